#include "qbd/csv.hpp"

#include "qbd/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qbd {

namespace {
const char* const column_row = "t,fidelity,prob_s2_plus,prob_ideal,I_t";

double parse_field(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        fail(ErrorCode::Validation, "csv line " + std::to_string(line) + ": bad number '" + s + "'");
    return x;
}
}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const RunOutput& run) {
    std::string out = "#";
    for (const auto& [k, v] : run.metadata) out += " " + k + "=" + v;
    out += "\n";
    out += column_row;
    out += "\n";
    for (const auto& r : run.rows) {
        out += format_double(r.t) + "," + format_double(r.fidelity) + "," + format_double(r.prob_s2_plus) + "," +
               format_double(r.prob_ideal) + "," + format_double(r.I_t) + "\n";
    }
    return out;
}

RunOutput parse_csv(const std::string& text) {
    RunOutput run;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool have_columns = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream words(line.substr(1));
            std::string w;
            while (words >> w) {
                const auto eq = w.find('=');
                if (eq == std::string::npos) fail(ErrorCode::Validation, "csv header: expected key=value");
                run.metadata[w.substr(0, eq)] = w.substr(eq + 1);
            }
            continue;
        }
        if (!have_columns) {
            if (line != column_row) fail(ErrorCode::Validation, "csv: unexpected column row '" + line + "'");
            have_columns = true;
            continue;
        }
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 5) fail(ErrorCode::Validation, "csv line " + std::to_string(lineno) + ": expected 5 fields");
        run.rows.push_back({parse_field(fields[0], lineno), parse_field(fields[1], lineno),
                            parse_field(fields[2], lineno), parse_field(fields[3], lineno),
                            parse_field(fields[4], lineno)});
    }
    if (!have_columns) fail(ErrorCode::Validation, "csv: missing column row");
    return run;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) fail(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(ErrorCode::Io, "rename to " + path.string() + " failed: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace qbd
