#include "xferbo/summary.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <regex>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "xferbo/csv.hpp"
#include "xferbo/errors.hpp"

namespace xferbo {

namespace {

double sorted_median(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    const std::size_t mid = begin + n / 2;
    if (n % 2 == 1) return v[mid];
    const double a = v[mid - 1], b = v[mid];
    return a == b ? a : 0.5 * (a + b);
}

} // namespace

Quartiles inclusive_quartiles(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("quartiles of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const std::size_t half = n / 2;
    if (n == 1) return {values[0], values[0], values[0]};
    Quartiles q;
    q.median = sorted_median(values, 0, n);
    if (n % 2 == 1) {
        q.q1 = sorted_median(values, 0, half + 1);
        q.q3 = sorted_median(values, half, n);
    } else {
        q.q1 = sorted_median(values, 0, half);
        q.q3 = sorted_median(values, half, n);
    }
    return q;
}

MethodSummary summarize_runs(const std::string& method, const std::vector<RunSeries>& runs) {
    if (runs.empty()) throw std::invalid_argument("summary needs at least one run");
    std::size_t length = runs.front().best.size();
    bool mismatch = false;
    for (const auto& r : runs) {
        if (r.best.size() != length) mismatch = true;
        length = std::min(length, r.best.size());
    }
    if (mismatch) spdlog::warn("{}: runs have different lengths, truncating to {} iterations", method, length);

    MethodSummary s{method, runs.size(), {}};
    for (std::size_t i = 0; i < length; ++i) {
        std::vector<double> v;
        double wall = 0.0;
        for (const auto& r : runs) {
            v.push_back(r.best[i]);
            wall += i < r.wall_time.size() ? r.wall_time[i] : 0.0;
        }
        IterationStats st;
        const auto q = inclusive_quartiles(v);
        st.median = q.median;
        st.q1 = q.q1;
        st.q3 = q.q3;
        st.min = *std::min_element(v.begin(), v.end());
        st.max = *std::max_element(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        st.mean = sum / static_cast<double>(v.size());
        st.wall_time_mean = wall / static_cast<double>(runs.size());
        s.iterations.push_back(st);
    }
    return s;
}

RunSeries read_history_series(const std::string& path) {
    const CsvTable t = read_csv_file(path);
    const std::size_t it = t.column("iter"), best = t.column("best_feasible"), wall = t.column("wall_time");
    RunSeries s;
    int current = -1;
    for (const auto& row : t.rows) {
        const int iter = static_cast<int>(parse_double(row.at(it)));
        const double b = parse_double(row.at(best)), w = parse_double(row.at(wall));
        if (iter == current) {
            s.best.back() = b;
            s.wall_time.back() = w;
        } else {
            if (iter != current + 1) throw ConfigError(path + ": iterations are not consecutive");
            s.best.push_back(b);
            s.wall_time.push_back(w);
            current = iter;
        }
    }
    return s;
}

ConvergenceSummary summarize_directory(const std::string& directory) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory)) throw ConfigError("not a directory: " + directory);
    const std::regex pattern(R"(history_(.+)_run(\d+)\.csv)");
    std::map<std::string, std::map<int, std::string>> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (std::regex_match(name, m, pattern)) files[m[1]][std::stoi(m[2])] = entry.path().string();
    }
    if (files.empty()) throw ConfigError("no history files in " + directory);
    ConvergenceSummary out;
    for (const auto& [method, runs] : files) {
        std::vector<RunSeries> series;
        for (const auto& [index, path] : runs) series.push_back(read_history_series(path));
        out.methods.push_back(summarize_runs(method, series));
    }
    return out;
}

void write_summary_csv(std::ostream& out, const MethodSummary& summary) {
    out << "iter,mean,median,q1,q3,min,max,wall_time_mean\n";
    for (std::size_t i = 0; i < summary.iterations.size(); ++i) {
        const auto& s = summary.iterations[i];
        out << i << ',' << format_double(s.mean) << ',' << format_double(s.median) << ',' << format_double(s.q1)
            << ',' << format_double(s.q3) << ',' << format_double(s.min) << ',' << format_double(s.max) << ','
            << format_double(s.wall_time_mean) << '\n';
    }
}

} // namespace xferbo
