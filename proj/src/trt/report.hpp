#pragma once
// Run reports and bit-stable CSV output. Floats are printed with 17
// significant digits so reruns with equal config produce identical bytes;
// wall-clock time is kept out of the files for the same reason.

#include "trt/config.hpp"

#include <string>
#include <vector>

namespace trt {

struct ReportCheck {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    std::string comparison;  // "<" or ">"
    bool pass = false;
};

struct RunReport {
    std::string command;
    std::string hash;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<ReportCheck> checks;
    double wall_seconds = 0.0;

    void metric(const std::string& name, double value) { metrics.emplace_back(name, value); }
    void check_less(const std::string& name, double measured, double threshold);
    void check_greater(const std::string& name, double measured, double threshold);
    bool passed() const;
};

std::string format_double(double v);  // %.17g

// report.csv: name,value,threshold,comparison,pass
void write_report_csv(const RunReport& rep, const std::string& path);

// Generic CSV writing with %.17g cells.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    void header(const std::vector<std::string>& names);
    void cell(const std::string& s);
    void cell(double v);
    void cell(long v);
    void end_row();

private:
    struct Impl;
    Impl* impl_;
};

// Voxel field CSV: index columns i1..in then upper-triangular components.
void write_field_csv(const std::string& path, int n, int res,
                     const std::vector<double>& comps);
std::vector<double> read_field_csv(const std::string& path, int n, int res);

std::vector<std::string> field_csv_header(int n);

}  // namespace trt
