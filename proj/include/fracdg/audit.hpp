#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracdg {

// One evaluated configuration of an inequality audit.
struct SampleRow {
    std::string config; // human-readable key: every number traces to its configuration
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool infinite = false; // rhs == 0 with lhs > 0
    bool pass = true;
};

// Per-inequality record: sampled configurations, worst ratio, the implied
// constant (smallest multiplier making every sample pass), and seed.
struct AuditReport {
    std::string id;
    std::vector<SampleRow> samples;
    double worst_ratio = 0.0;
    double implied_constant = 0.0;
    bool pass = true;
    std::uint64_t seed = 0;
    int infinite_ratios = 0;
    bool not_applicable = false;
    std::vector<std::string> warnings;

    // ratio policy: 0/0 -> 0, x/0 -> infinite-ratio flag (reported, no throw)
    SampleRow& add_sample(std::string config, double lhs, double rhs) {
        SampleRow row;
        row.config = std::move(config);
        row.lhs = lhs;
        row.rhs = rhs;
        if (rhs == 0.0) {
            if (lhs == 0.0) {
                row.ratio = 0.0;
            } else {
                row.ratio = std::numeric_limits<double>::infinity();
                row.infinite = true;
                ++infinite_ratios;
            }
        } else {
            row.ratio = lhs / rhs;
        }
        if (!row.infinite && std::isfinite(row.ratio))
            worst_ratio = std::max(worst_ratio, row.ratio);
        samples.push_back(std::move(row));
        return samples.back();
    }

    void finish_fixed_constant() {
        // pass <=> worst ratio <= 1 and no infinite ratios
        pass = infinite_ratios == 0;
        for (auto& r : samples) {
            r.pass = !r.infinite && r.ratio <= 1.0 + 1e-12;
            pass = pass && r.pass;
        }
        implied_constant = worst_ratio;
    }

    void finish_estimation(double budget = 0.0) {
        implied_constant = worst_ratio;
        pass = infinite_ratios == 0;
        if (budget > 0.0) pass = pass && implied_constant <= budget;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["id"] = id;
        j["pass"] = pass;
        j["not_applicable"] = not_applicable;
        j["worst_ratio"] = worst_ratio;
        j["implied_constant"] = implied_constant;
        j["infinite_ratios"] = infinite_ratios;
        j["seed"] = seed;
        j["warnings"] = warnings;
        j["sample_count"] = samples.size();
        return j;
    }

    void write_samples_csv(std::ostream& os) const {
        os << "config,lhs,rhs,ratio,infinite,pass\n";
        char buf[128];
        for (const auto& r : samples) {
            os << '"' << r.config << '"' << ',';
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d\n", r.lhs, r.rhs, r.ratio,
                          r.infinite ? 1 : 0, r.pass ? 1 : 0);
            os << buf;
        }
    }
};

} // namespace fracdg
