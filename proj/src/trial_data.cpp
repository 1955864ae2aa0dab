#include "progbayes/trial_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "progbayes/errors.hpp"

namespace progbayes {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, std::size_t row, const std::string& column) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw LoadError("row " + std::to_string(row) + ", column '" + column + "': value '" +
                        text + "' is not a number");
    if (!std::isfinite(value))
        throw LoadError("row " + std::to_string(row) + ", column '" + column + "': value '" +
                        text + "' is not finite");
    return value;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // data rows, 1-based reporting
};

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open file: " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty file: " + path.string());
    table.header = split_csv_line(line);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        auto fields = split_csv_line(line);
        if (fields.size() != table.header.size())
            throw LoadError("row " + std::to_string(row) + ": expected " +
                            std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
    }
    return table;
}

std::size_t find_column(const CsvTable& table, const std::string& name,
                        const std::filesystem::path& path) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == name) return i;
    throw LoadError("missing column '" + name + "' in " + path.string());
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TrialData TrialData::from_columns(std::vector<double> y, std::vector<int> w,
                                  std::vector<double> m) {
    const std::size_t n = y.size();
    if (w.size() != n || m.size() != n)
        throw LoadError("trial columns must have equal length");
    if (n < 4) throw LoadError("trial must have at least 4 subjects, got " + std::to_string(n));

    std::size_t treated = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(y[i]))
            throw LoadError("row " + std::to_string(i + 1) + ", column 'y': non-finite value");
        if (!std::isfinite(m[i]))
            throw LoadError("row " + std::to_string(i + 1) + ", column 'm': non-finite value");
        if (w[i] != 0 && w[i] != 1)
            throw LoadError("row " + std::to_string(i + 1) + ", column 'w': value '" +
                            std::to_string(w[i]) + "' is not 0 or 1");
        treated += static_cast<std::size_t>(w[i]);
    }
    if (treated == 0) throw LoadError("trial has no treated subjects (all w = 0)");
    if (treated == n) throw LoadError("trial has no control subjects (all w = 1)");

    double mbar = 0.0;
    for (double v : m) mbar += v;
    mbar /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : m) ss += (v - mbar) * (v - mbar);
    if (ss == 0.0) throw LoadError("prognostic score has zero variance");

    TrialData data;
    data.y_ = std::move(y);
    data.w_ = std::move(w);
    data.m_ = std::move(m);
    data.treated_ = treated;
    return data;
}

GroupSummary summarize(const TrialData& data) {
    GroupSummary s;
    const auto y = data.y();
    const auto w = data.w();
    const auto m = data.m();
    const std::size_t n = data.n();
    double sum_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_m += m[i];
        if (w[i] == 1) {
            s.ybar_treated += y[i];
            s.mbar_treated += m[i];
            ++s.n_treated;
        } else {
            s.ybar_control += y[i];
            s.mbar_control += m[i];
            ++s.n_control;
        }
    }
    s.ybar_treated /= static_cast<double>(s.n_treated);
    s.mbar_treated /= static_cast<double>(s.n_treated);
    s.ybar_control /= static_cast<double>(s.n_control);
    s.mbar_control /= static_cast<double>(s.n_control);
    s.mbar = sum_m / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (m[i] - s.mbar) * (m[i] - s.mbar);
    s.s2_m = ss / static_cast<double>(n);
    return s;
}

HistoricalSubjects HistoricalSubjects::from_rows(const std::vector<std::string>& study_ids,
                                                 const std::vector<double>& y,
                                                 const std::vector<double>& m) {
    if (study_ids.size() != y.size() || y.size() != m.size())
        throw LoadError("historical columns must have equal length");
    if (y.empty()) throw LoadError("historical data has no rows");

    HistoricalSubjects hist;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]))
            throw LoadError("row " + std::to_string(i + 1) + ", column 'y': non-finite value");
        if (!std::isfinite(m[i]))
            throw LoadError("row " + std::to_string(i + 1) + ", column 'm': non-finite value");
        if (study_ids[i].empty())
            throw LoadError("row " + std::to_string(i + 1) + ": empty study_id");
        auto [it, inserted] = index.try_emplace(study_ids[i], hist.studies_.size());
        if (inserted) hist.studies_.push_back(Study{study_ids[i], {}, {}});
        auto& study = hist.studies_[it->second];
        study.y.push_back(y[i]);
        study.m.push_back(m[i]);
        ++hist.total_;
    }
    for (const auto& study : hist.studies_)
        if (study.size() < 2)
            throw LoadError("study '" + study.id + "' has fewer than 2 subjects");
    return hist;
}

TrialData load_trial_csv(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    for (const auto& name : table.header)
        if (name != "y" && name != "w" && name != "m" && name != "subject_id")
            throw LoadError("unexpected column '" + name + "' in " + path.string());
    const auto yi = find_column(table, "y", path);
    const auto wi = find_column(table, "w", path);
    const auto mi = find_column(table, "m", path);

    std::vector<double> y, m;
    std::vector<int> w;
    y.reserve(table.rows.size());
    w.reserve(table.rows.size());
    m.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        y.push_back(parse_double(row[yi], r + 1, "y"));
        m.push_back(parse_double(row[mi], r + 1, "m"));
        const auto& wtext = row[wi];
        if (wtext == "0")
            w.push_back(0);
        else if (wtext == "1")
            w.push_back(1);
        else
            throw LoadError("row " + std::to_string(r + 1) + ", column 'w': value '" + wtext +
                            "' is not 0 or 1");
    }
    return TrialData::from_columns(std::move(y), std::move(w), std::move(m));
}

void write_trial_csv(const TrialData& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot open file for writing: " + path.string());
    out << "y,w,m\n";
    for (std::size_t i = 0; i < data.n(); ++i)
        out << format_double(data.y()[i]) << ',' << data.w()[i] << ','
            << format_double(data.m()[i]) << '\n';
    if (!out) throw LoadError("failed writing " + path.string());
}

HistoricalSubjects load_historical_csv(const std::filesystem::path& path) {
    const auto table = read_csv(path);
    for (const auto& name : table.header)
        if (name != "study_id" && name != "y" && name != "m")
            throw LoadError("unexpected column '" + name + "' in " + path.string());
    const auto si = find_column(table, "study_id", path);
    const auto yi = find_column(table, "y", path);
    const auto mi = find_column(table, "m", path);

    std::vector<std::string> ids;
    std::vector<double> y, m;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        ids.push_back(row[si]);
        y.push_back(parse_double(row[yi], r + 1, "y"));
        m.push_back(parse_double(row[mi], r + 1, "m"));
    }
    return HistoricalSubjects::from_rows(ids, y, m);
}

}  // namespace progbayes
