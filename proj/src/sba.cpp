#include "riskalloc/sba.hpp"

#include <algorithm>
#include <cmath>

#include "riskalloc/errors.hpp"

namespace riskalloc {

void SbaParams::validate() const {
    require(bucket_count >= 1, ErrorCode::invalid_argument, "need at least one bucket");
    require(other_bucket < bucket_count, ErrorCode::invalid_argument,
            "other_bucket out of range");
    require(risk_weights.size() == bucket_count, ErrorCode::invalid_argument,
            "risk_weights must have one entry per bucket");
    for (double w : risk_weights)
        require(w > 0.0, ErrorCode::invalid_argument, "risk weights must be positive");
    require(intra_corr.size() == bucket_count, ErrorCode::invalid_argument,
            "intra_corr must have one matrix per bucket");
    require(factors_per_bucket.size() == bucket_count, ErrorCode::invalid_argument,
            "factors_per_bucket must have one entry per bucket");
    for (std::size_t b = 0; b < bucket_count; ++b) {
        const std::size_t nb = factors_per_bucket[b];
        require(intra_corr[b].size() == nb * nb, ErrorCode::invalid_argument,
                "intra_corr matrix size mismatch in bucket " + std::to_string(b + 1));
        for (double r : intra_corr[b])
            require(r >= -1.0 && r <= 1.0, ErrorCode::invalid_argument,
                    "correlations must lie in [-1, 1]");
    }
    require(cross_corr.size() == bucket_count * bucket_count,
            ErrorCode::invalid_argument, "cross_corr must be bucket_count^2");
    for (std::size_t b = 0; b < bucket_count; ++b) {
        for (std::size_t c = 0; c < bucket_count; ++c) {
            const double g = gamma(b, c);
            require(g >= -1.0 && g <= 1.0, ErrorCode::invalid_argument,
                    "gamma entries must lie in [-1, 1]");
            require(gamma(b, c) == gamma(c, b), ErrorCode::invalid_argument,
                    "gamma must be symmetric");
        }
        require(gamma(b, b) == 1.0, ErrorCode::invalid_argument,
                "gamma diagonal must be 1");
    }
}

SensitivitySet::SensitivitySet(
    std::vector<std::string> unit_ids,
    std::vector<std::map<std::size_t, std::vector<double>>> per_unit)
    : unit_ids_(std::move(unit_ids)), per_unit_(std::move(per_unit)) {
    require(unit_ids_.size() == per_unit_.size(), ErrorCode::invalid_argument,
            "unit ids and sensitivity maps must align");
    require(!unit_ids_.empty(), ErrorCode::invalid_argument,
            "need at least one risk unit");
}

void SensitivitySet::check_against(const SbaParams& params) const {
    for (std::size_t i = 0; i < units(); ++i) {
        for (const auto& [bucket, values] : per_unit_[i]) {
            require(bucket < params.bucket_count, ErrorCode::invalid_argument,
                    "unit '" + unit_ids_[i] + "' references bucket " +
                        std::to_string(bucket + 1) + " beyond bucket_count");
            require(values.size() == params.factors_per_bucket[bucket],
                    ErrorCode::invalid_argument,
                    "unit '" + unit_ids_[i] + "' bucket " + std::to_string(bucket + 1) +
                        " has " + std::to_string(values.size()) + " factors, expected " +
                        std::to_string(params.factors_per_bucket[bucket]));
        }
    }
}

std::vector<std::vector<double>> SensitivitySet::net(Coalition coalition,
                                                     const SbaParams& params) const {
    if (units() < Coalition::max_units)
        require((coalition.bits() >> units()) == 0, ErrorCode::invalid_argument,
                "coalition member out of range");
    std::vector<std::vector<double>> out(params.bucket_count);
    for (std::size_t b = 0; b < params.bucket_count; ++b)
        out[b].assign(params.factors_per_bucket[b], 0.0);
    const std::size_t limit = std::min(units(), Coalition::max_units);
    for (std::size_t i = 0; i < limit; ++i) {
        if (!coalition.contains(i)) continue;
        for (const auto& [bucket, values] : per_unit_[i])
            for (std::size_t k = 0; k < values.size(); ++k) out[bucket][k] += values[k];
    }
    return out;
}

SensitivitySet SensitivitySet::grouped(const std::vector<std::vector<int>>& groups,
                                       const std::vector<std::string>& group_ids) const {
    require(groups.size() == group_ids.size(), ErrorCode::invalid_argument,
            "groups and group_ids must align");
    std::vector<std::map<std::size_t, std::vector<double>>> merged(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<int> members = groups[g];
        std::sort(members.begin(), members.end());
        for (int i : members) {
            require(i >= 0 && static_cast<std::size_t>(i) < units(),
                    ErrorCode::invalid_argument, "group member out of range");
            for (const auto& [bucket, values] : per_unit_[static_cast<std::size_t>(i)]) {
                auto& slot = merged[g][bucket];
                if (slot.empty()) slot.assign(values.size(), 0.0);
                require(slot.size() == values.size(), ErrorCode::invalid_argument,
                        "inconsistent factor dimension within bucket");
                for (std::size_t k = 0; k < values.size(); ++k) slot[k] += values[k];
            }
        }
    }
    return SensitivitySet(group_ids, std::move(merged));
}

double sba_delta_eq(const std::vector<std::vector<double>>& net_sensitivities,
                    const SbaParams& params) {
    require(net_sensitivities.size() == params.bucket_count,
            ErrorCode::invalid_argument, "net sensitivities must cover all buckets");

    const std::size_t nb_total = params.bucket_count;
    std::vector<std::vector<double>> ws(nb_total);
    std::vector<double> k_b(nb_total, 0.0);
    std::vector<double> ws_sum(nb_total, 0.0);

    for (std::size_t b = 0; b < nb_total; ++b) {
        const auto& s = net_sensitivities[b];
        require(s.size() == params.factors_per_bucket[b], ErrorCode::invalid_argument,
                "factor dimension mismatch in bucket " + std::to_string(b + 1));
        ws[b].resize(s.size());
        for (std::size_t k = 0; k < s.size(); ++k)
            ws[b][k] = params.risk_weights[b] * s[k];

        double sum = 0.0;
        for (double w : ws[b]) sum += w;
        ws_sum[b] = sum;

        if (b == params.other_bucket) {
            double abs_sum = 0.0;
            for (double w : ws[b]) abs_sum += std::abs(w);
            k_b[b] = abs_sum;
        } else {
            double radicand = 0.0;
            for (double w : ws[b]) radicand += w * w;
            for (std::size_t k = 0; k < ws[b].size(); ++k)
                for (std::size_t l = k + 1; l < ws[b].size(); ++l)
                    radicand += 2.0 * params.rho(b, k, l) * ws[b][k] * ws[b][l];
            k_b[b] = std::sqrt(std::max(radicand, 0.0));
        }
    }

    auto cross_total = [&](const std::vector<double>& s_b) {
        double total = 0.0;
        for (double kb : k_b) total += kb * kb;
        for (std::size_t b = 0; b < nb_total; ++b)
            for (std::size_t c = b + 1; c < nb_total; ++c)
                total += 2.0 * params.gamma(b, c) * s_b[b] * s_b[c];
        return total;
    };

    double total = cross_total(ws_sum);
    if (total < 0.0) {
        // Cap/floor fallback: S_b = max(min(sum WS, K_b), -K_b).
        std::vector<double> capped(nb_total);
        for (std::size_t b = 0; b < nb_total; ++b)
            capped[b] = std::max(std::min(ws_sum[b], k_b[b]), -k_b[b]);
        total = cross_total(capped);
    }
    return std::sqrt(std::max(total, 0.0));
}

double sba_delta_eq(const SensitivitySet& sensitivities, Coalition coalition,
                    const SbaParams& params) {
    return sba_delta_eq(sensitivities.net(coalition, params), params);
}

}  // namespace riskalloc
