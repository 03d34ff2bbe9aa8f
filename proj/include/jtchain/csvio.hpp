#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jt {

/// Round-trip-safe float formatting for CSV cells: 17 significant digits
/// by default (override with JT_CSV_PRECISION), the literal "inf" for
/// divergent entries, negative zero normalized away.
std::string format_float(double v);

int csv_precision();

/// Incremental CSV writer with a fixed header; cells are preformatted
/// strings so every byte is under the caller's control.
class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    void close(); // flush and rename into place
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::size_t columns_;
    std::string buffer_;
    bool closed_ = false;
};

/// FNV-1a of a byte string; stamps config provenance into run metadata.
std::uint64_t fnv1a(const std::string& bytes);

/// Write the JSON metadata sidecar next to the CSV outputs.
void write_metadata(const std::string& path, const std::string& command,
                    const std::string& config_text,
                    const std::vector<std::pair<std::string, std::string>>& extra);

bool ensure_directory(const std::string& path);

} // namespace jt
