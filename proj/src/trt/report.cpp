#include "trt/report.hpp"

#include "trt/frames.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trt {

void RunReport::check_less(const std::string& name, double measured, double threshold) {
    checks.push_back({name, measured, threshold, "<", measured < threshold});
}

void RunReport::check_greater(const std::string& name, double measured, double threshold) {
    checks.push_back({name, measured, threshold, ">", measured > threshold});
}

bool RunReport::passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
    bool row_started = false;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path, std::ios::binary);  // LF endings everywhere
    if (!impl_->out) {
        delete impl_;
        throw std::runtime_error("cannot open output file: " + path);
    }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) {
        if (i) impl_->out << ",";
        impl_->out << names[i];
    }
    impl_->out << "\n";
}

void CsvWriter::cell(const std::string& s) {
    if (impl_->row_started) impl_->out << ",";
    impl_->out << s;
    impl_->row_started = true;
}

void CsvWriter::cell(double v) { cell(format_double(v)); }

void CsvWriter::cell(long v) { cell(std::to_string(v)); }

void CsvWriter::end_row() {
    impl_->out << "\n";
    impl_->row_started = false;
}

void write_report_csv(const RunReport& rep, const std::string& path) {
    CsvWriter w(path);
    w.header({"name", "value", "threshold", "comparison", "pass"});
    w.cell(std::string("command"));
    w.cell(rep.command);
    w.cell(std::string(""));
    w.cell(std::string(""));
    w.cell(std::string(""));
    w.end_row();
    w.cell(std::string("config_hash"));
    w.cell(rep.hash);
    w.cell(std::string(""));
    w.cell(std::string(""));
    w.cell(std::string(""));
    w.end_row();
    for (const auto& [name, value] : rep.metrics) {
        w.cell(name);
        w.cell(value);
        w.cell(std::string(""));
        w.cell(std::string(""));
        w.cell(std::string(""));
        w.end_row();
    }
    for (const auto& c : rep.checks) {
        w.cell(c.name);
        w.cell(c.measured);
        w.cell(c.threshold);
        w.cell(c.comparison);
        w.cell(std::string(c.pass ? "1" : "0"));
        w.end_row();
    }
}

std::vector<std::string> field_csv_header(int n) {
    std::vector<std::string> h;
    for (int i = 1; i <= n; ++i) h.push_back("i" + std::to_string(i));
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) h.push_back("f" + std::to_string(i) + std::to_string(j));
    return h;
}

void write_field_csv(const std::string& path, int n, int res,
                     const std::vector<double>& comps) {
    const int nc = sym_component_count(n);
    long count = 1;
    for (int i = 0; i < n; ++i) count *= res;
    if (static_cast<long>(comps.size()) != count * nc)
        throw std::invalid_argument("write_field_csv: component buffer size mismatch");
    CsvWriter w(path);
    w.header(field_csv_header(n));
    std::vector<int> idx(n, 0);
    for (long v = 0; v < count; ++v) {
        long f = v;
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(f % res);
            f /= res;
        }
        for (int i = 0; i < n; ++i) w.cell(static_cast<long>(idx[i]));
        for (int c = 0; c < nc; ++c) w.cell(comps[v * nc + c]);
        w.end_row();
    }
}

std::vector<double> read_field_csv(const std::string& path, int n, int res) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field file: " + path);
    const int nc = sym_component_count(n);
    long count = 1;
    for (int i = 0; i < n; ++i) count *= res;
    std::vector<double> comps(count * nc, 0.0);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("field file is empty: " + path);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string item;
        std::vector<std::string> cells;
        while (std::getline(ss, item, ',')) cells.push_back(item);
        if (static_cast<int>(cells.size()) != n + nc)
            throw std::runtime_error("field file line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(n + nc) + " columns");
        long flat = 0;
        for (int i = 0; i < n; ++i) {
            const long v = std::stol(cells[i]);
            if (v < 0 || v >= res)
                throw std::runtime_error("field file line " + std::to_string(lineno) +
                                         ": voxel index out of range");
            flat = flat * res + v;
        }
        for (int c = 0; c < nc; ++c) comps[flat * nc + c] = std::stod(cells[n + c]);
    }
    return comps;
}

}  // namespace trt
