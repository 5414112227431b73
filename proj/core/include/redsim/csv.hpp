#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace redsim {

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double v);

/// Minimal CSV writer: comma separated, '\n' line endings, no quoting (the
/// tool never writes fields that need it). Missing values become empty cells.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::optional<double>>& cells);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& os_;
};

}  // namespace redsim
