#include "mnl/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mnl/errors.hpp"

namespace mnl {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string header_line(std::string_view tool, std::uint64_t seed, std::string_view config_digest,
                        std::string_view extra) {
    std::string line = "# " + std::string(tool) + " seed=" + std::to_string(seed) +
                       " config_digest=" + std::string(config_digest);
    if (!extra.empty()) {
        line += ' ';
        line += extra;
    }
    line += '\n';
    return line;
}

std::string evaluation_csv(std::string_view header, std::span<const SplitReport> reports) {
    std::ostringstream out;
    out << header << "split,l,coverage,rmse_mpu,rmse_dpu,acc_mpu,acc_dpu,score,n\n";
    for (const auto& sr : reports) {
        const EvalReport& r = sr.report;
        for (const auto& [l, p] : r.coverage) {
            out << sr.split << ',' << format_real(l) << ',' << format_real(p) << ',' << format_real(r.rmse_mpu) << ','
                << format_real(r.rmse_dpu) << ',' << format_real(r.acc_mpu) << ',' << format_real(r.acc_dpu) << ','
                << format_real(r.score) << ',' << r.n << '\n';
        }
    }
    return out.str();
}

std::string population_csv(std::string_view header, std::span<const MemberSummary> members) {
    std::ostringstream out;
    out << header << "agent,seed,train_rmse_mpu,train_rmse_dpu,rmse_mpu,rmse_dpu,acc_mpu,acc_dpu,score\n";
    for (const auto& m : members) {
        out << m.index << ',' << m.seed << ',' << format_real(m.train_rmse_mpu) << ','
            << format_real(m.train_rmse_dpu) << ',' << format_real(m.report.rmse_mpu) << ','
            << format_real(m.report.rmse_dpu) << ',' << format_real(m.report.acc_mpu) << ','
            << format_real(m.report.acc_dpu) << ',' << format_real(m.report.score) << '\n';
    }
    return out.str();
}

std::string population_summary_csv(std::string_view header, std::span<const MemberSummary> members) {
    if (members.empty()) {
        throw ParameterError("population summary: no members");
    }
    struct Metric {
        const char* unit;
        const char* name;
        double (*get)(const MemberSummary&);
    };
    const Metric metrics[] = {
        {"MPU", "rmse", [](const MemberSummary& m) { return m.train_rmse_mpu; }},
        {"DPU", "rmse", [](const MemberSummary& m) { return m.train_rmse_dpu; }},
        {"MPU", "accuracy", [](const MemberSummary& m) { return m.report.acc_mpu; }},
        {"DPU", "accuracy", [](const MemberSummary& m) { return m.report.acc_dpu; }},
    };
    std::ostringstream out;
    out << header << "unit,metric,min,max,mean\n";
    for (const auto& metric : metrics) {
        double lo = metric.get(members.front());
        double hi = lo;
        double sum = 0.0;
        for (const auto& m : members) {
            const double v = metric.get(m);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        // Clamp guards the mean against rounding past min/max.
        const double mean = std::clamp(sum / static_cast<double>(members.size()), lo, hi);
        out << metric.unit << ',' << metric.name << ',' << format_real(lo) << ',' << format_real(hi) << ','
            << format_real(mean) << '\n';
    }
    return out.str();
}

std::string sweep_csv(std::string_view header, std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << header << "window,l,train_coverage,test_coverage,train_score,test_score,train_n,test_n\n";
    for (const auto& row : rows) {
        out << row.window << ',' << format_real(row.l) << ',' << format_real(row.train.coverage_at(row.l)) << ','
            << format_real(row.test.coverage_at(row.l)) << ',' << format_real(row.train.score) << ','
            << format_real(row.test.score) << ',' << row.train.n << ',' << row.test.n << '\n';
    }
    return out.str();
}

std::string intervals_csv(std::string_view header, std::span<const IntervalRow> rows) {
    std::ostringstream out;
    out << header << "date,r,mu,sigma,lower,upper,hit\n";
    for (const auto& row : rows) {
        out << format_date(row.date) << ',' << format_real(row.r) << ',' << format_real(row.interval.mu) << ','
            << format_real(row.interval.sigma) << ',' << format_real(row.interval.lower) << ','
            << format_real(row.interval.upper) << ',' << (row.hit ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::missing_file, "cannot write '" + path.string() + "'");
    }
    out << text;
}

}  // namespace mnl
