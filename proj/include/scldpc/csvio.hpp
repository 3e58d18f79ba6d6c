#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scldpc {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Comma-delimited table with a mandatory header row. Numeric cells are
/// written with enough digits to round-trip a double exactly.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
    std::string to_string() const;
};

std::string format_full(double x);

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

void write_text_file(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

/// FNV-1a 64-bit, hex-encoded; used to pin the resolved ensemble matrix in
/// run manifests.
std::string fnv1a_hex(const std::string& body);

}  // namespace scldpc
