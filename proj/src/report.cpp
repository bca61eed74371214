#include "sublin/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sublin/numeric.hpp"

namespace sublin {

namespace {

constexpr const char* kMagic = "sublin-report";
constexpr const char* kVersion = "1";

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_value(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::runtime_error("bad numeric field '" + s + "'");
    }
}

void require_clean(const std::string& field, const std::string& where) {
    if (field.find(',') != std::string::npos || field.find('\n') != std::string::npos)
        throw std::invalid_argument("field may not contain commas or newlines (" + where + "): '" +
                                    field + "'");
}

}  // namespace

bool ExperimentReport::any_status(const std::string& status) const {
    for (const auto& v : verdicts)
        if (v.status == status) return true;
    return false;
}

int ExperimentReport::exit_code() const {
    if (any_status("fail")) return 1;
    if (any_status("inconclusive") || any_status("hypotheses_not_met")) return 3;
    return 0;
}

std::string serialize_report(const ExperimentReport& report) {
    std::ostringstream os;
    os << kMagic << ' ' << kVersion << '\n';
    os << "experiment: " << report.experiment << '\n';
    os << "config-hash: " << report.config_hash << '\n';
    os << "[config]\n";
    for (const auto& [k, v] : report.config_echo) os << k << " = " << v << '\n';
    os << "[table]\n";
    os << "experiment,horizon,strategy,function,statistic,value,stderr\n";
    for (const auto& r : report.table) {
        require_clean(r.experiment, "table.experiment");
        require_clean(r.strategy, "table.strategy");
        require_clean(r.function, "table.function");
        require_clean(r.statistic, "table.statistic");
        os << r.experiment << ',' << r.horizon << ',' << r.strategy << ',' << r.function << ','
           << r.statistic << ',' << format_full(r.value) << ',' << format_full(r.std_error)
           << '\n';
    }
    os << "[verdicts]\n";
    os << "name,status,threshold,observed,note\n";
    for (const auto& v : report.verdicts) {
        require_clean(v.name, "verdict.name");
        require_clean(v.status, "verdict.status");
        require_clean(v.note, "verdict.note");
        os << v.name << ',' << v.status << ',' << format_full(v.threshold) << ','
           << format_full(v.observed) << ',' << v.note << '\n';
    }
    os << "[constants]\n";
    os << "name,value\n";
    for (const auto& c : report.constants) {
        require_clean(c.name, "constant.name");
        os << c.name << ',' << format_full(c.value) << '\n';
    }
    std::string body = os.str();
    body += "checksum: " + hex64(fnv1a64(body)) + "\n";
    return body;
}

ExperimentReport parse_report(const std::string& text) {
    // Checksum covers everything before its own line.
    const auto mark = text.rfind("checksum: ");
    if (mark == std::string::npos || text.back() != '\n')
        throw std::runtime_error("report missing checksum");
    const std::string body = text.substr(0, mark);
    const std::string stored = text.substr(mark + 10, text.size() - mark - 11);
    if (stored != hex64(fnv1a64(body)))
        throw std::runtime_error("report checksum mismatch: stored " + stored + ", computed " +
                                 hex64(fnv1a64(body)));

    std::istringstream is(body);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty report");
    {
        const auto parts = split(line, ' ');
        if (parts.size() != 2 || parts[0] != kMagic)
            throw std::runtime_error("not a report file");
        if (parts[1] != kVersion)
            throw std::runtime_error("report version mismatch: file has '" + parts[1] +
                                     "', reader supports '" + kVersion + "'");
    }

    ExperimentReport rep;
    auto read_header = [&](const char* key) {
        if (!std::getline(is, line) || line.rfind(key, 0) != 0)
            throw std::runtime_error(std::string("expected header '") + key + "'");
        return line.substr(std::string(key).size());
    };
    rep.experiment = read_header("experiment: ");
    rep.config_hash = read_header("config-hash: ");

    enum Section { none, config, table, verdicts, constants } section = none;
    bool skip_schema = false;
    while (std::getline(is, line)) {
        if (line == "[config]") { section = config; continue; }
        if (line == "[table]") { section = table; skip_schema = true; continue; }
        if (line == "[verdicts]") { section = verdicts; skip_schema = true; continue; }
        if (line == "[constants]") { section = constants; skip_schema = true; continue; }
        if (skip_schema) { skip_schema = false; continue; }
        switch (section) {
            case config: {
                const auto eq = line.find(" = ");
                if (eq == std::string::npos) throw std::runtime_error("bad config line: " + line);
                rep.config_echo.emplace_back(line.substr(0, eq), line.substr(eq + 3));
                break;
            }
            case table: {
                const auto f = split(line, ',');
                if (f.size() != 7) throw std::runtime_error("bad table row: " + line);
                rep.table.push_back({f[0], static_cast<std::int64_t>(parse_value(f[1])), f[2],
                                     f[3], f[4], parse_value(f[5]), parse_value(f[6])});
                break;
            }
            case verdicts: {
                const auto f = split(line, ',');
                if (f.size() != 5) throw std::runtime_error("bad verdict row: " + line);
                rep.verdicts.push_back({f[0], f[1], parse_value(f[2]), parse_value(f[3]), f[4]});
                break;
            }
            case constants: {
                const auto f = split(line, ',');
                if (f.size() != 2) throw std::runtime_error("bad constant row: " + line);
                rep.constants.push_back({f[0], parse_value(f[1])});
                break;
            }
            case none:
                throw std::runtime_error("content before first section: " + line);
        }
    }
    return rep;
}

void persist(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << serialize_report(report);
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ExperimentReport load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_report(ss.str());
}

void write_table_csv(const ExperimentReport& report, std::ostream& os) {
    os << "experiment,horizon,strategy,function,statistic,value,stderr\n";
    for (const auto& r : report.table)
        os << r.experiment << ',' << r.horizon << ',' << r.strategy << ',' << r.function << ','
           << r.statistic << ',' << format_full(r.value) << ',' << format_full(r.std_error)
           << '\n';
}

}  // namespace sublin
