#pragma once
// Machine-readable campaign output. One header record (resolved config and
// artifact version), one data record per row, one trailing summary record.
// Doubles are serialized with 17 significant digits so that parsing an
// emitted file reproduces the in-memory records exactly.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace erw {

inline constexpr const char* kArtifactName = "erwlab";
inline constexpr const char* kArtifactVersion = "0.1.0";

enum class ReportFormat { csv, json };

struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // resolved, ordered
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> summary;

    bool operator==(const Report&) const = default;
};

std::string format_double(double v);  // %.17g

void write_report(const Report& report, ReportFormat format, std::ostream& out);
Report read_report(ReportFormat format, std::istream& in);

}  // namespace erw
