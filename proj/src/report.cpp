#include "erw/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace erw {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (const char c : line) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

void write_csv(const Report& r, std::ostream& out) {
    out << "# " << kArtifactName << " " << kArtifactVersion << "\n";
    out << "# command " << r.command << "\n";
    for (const auto& [key, value] : r.config) {
        out << "# config " << key << "=" << value << "\n";
    }
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        out << (i ? "," : "") << r.columns[i];
    }
    out << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << "\n";
    }
    for (const auto& [key, value] : r.summary) {
        out << "# summary " << key << "=" << format_double(value) << "\n";
    }
}

Report read_csv(std::istream& in) {
    Report r;
    std::string line;
    bool have_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# command ", 0) == 0) {
            r.command = line.substr(10);
        } else if (line.rfind("# config ", 0) == 0) {
            const std::string kv = line.substr(9);
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::runtime_error("bad config line");
            r.config.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        } else if (line.rfind("# summary ", 0) == 0) {
            const std::string kv = line.substr(10);
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::runtime_error("bad summary line");
            r.summary.emplace_back(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
        } else if (line[0] == '#') {
            continue;  // banner
        } else if (!have_columns) {
            r.columns = split(line, ',');
            have_columns = true;
        } else {
            const auto parts = split(line, ',');
            std::vector<double> row;
            row.reserve(parts.size());
            for (const auto& part : parts) row.push_back(std::stod(part));
            r.rows.push_back(std::move(row));
        }
    }
    return r;
}

void write_json(const Report& r, std::ostream& out) {
    nlohmann::ordered_json j;
    j["artifact"] = kArtifactName;
    j["version"] = kArtifactVersion;
    j["command"] = r.command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : r.config) config[key] = value;
    j["config"] = std::move(config);
    j["columns"] = r.columns;
    j["rows"] = r.rows;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [key, value] : r.summary) summary[key] = value;
    j["summary"] = std::move(summary);
    out << j.dump(2) << "\n";
}

Report read_json(std::istream& in) {
    nlohmann::ordered_json j;
    in >> j;
    Report r;
    r.command = j.at("command").get<std::string>();
    for (const auto& [key, value] : j.at("config").items()) {
        r.config.emplace_back(key, value.get<std::string>());
    }
    r.columns = j.at("columns").get<std::vector<std::string>>();
    r.rows = j.at("rows").get<std::vector<std::vector<double>>>();
    for (const auto& [key, value] : j.at("summary").items()) {
        r.summary.emplace_back(key, value.get<double>());
    }
    return r;
}

}  // namespace

void write_report(const Report& report, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::csv) {
        write_csv(report, out);
    } else {
        write_json(report, out);
    }
}

Report read_report(ReportFormat format, std::istream& in) {
    return format == ReportFormat::csv ? read_csv(in) : read_json(in);
}

}  // namespace erw
