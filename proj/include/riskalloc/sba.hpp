#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "riskalloc/exposures.hpp"

namespace riskalloc {

/// FRTB sensitivity-based aggregation parameters. Buckets are 0-based here;
/// files use the regulation's 1-based numbering. Values are never hardcoded:
/// they come from a parameter file (see io.hpp).
struct SbaParams {
    std::size_t bucket_count = 0;
    std::size_t other_bucket = 0;            // absolute-sum bucket, 0-based
    std::vector<double> risk_weights;        // w_b > 0, length bucket_count
    std::vector<std::vector<double>> intra_corr;  // per bucket: N_b x N_b, row-major
    std::vector<double> cross_corr;          // gamma, bucket_count x bucket_count
    std::vector<std::size_t> factors_per_bucket;  // N_b per bucket

    void validate() const;
    double gamma(std::size_t b, std::size_t c) const {
        return cross_corr[b * bucket_count + c];
    }
    double rho(std::size_t b, std::size_t k, std::size_t l) const {
        return intra_corr[b][k * factors_per_bucket[b] + l];
    }
};

/// Raw delta sensitivities per risk unit: unit -> bucket -> factor vector.
class SensitivitySet {
  public:
    SensitivitySet(std::vector<std::string> unit_ids,
                   std::vector<std::map<std::size_t, std::vector<double>>> per_unit);

    std::size_t units() const { return unit_ids_.size(); }
    const std::vector<std::string>& unit_ids() const { return unit_ids_; }
    const std::map<std::size_t, std::vector<double>>& unit(std::size_t i) const {
        return per_unit_[i];
    }

    void check_against(const SbaParams& params) const;

    /// Net sensitivities of a coalition: per bucket, the factor-wise sum over
    /// member units in increasing index order.
    std::vector<std::vector<double>> net(Coalition coalition,
                                         const SbaParams& params) const;

    /// Sum of the selected unit groups into a new set (hierarchy levels).
    SensitivitySet grouped(const std::vector<std::vector<int>>& groups,
                           const std::vector<std::string>& group_ids) const;

  private:
    std::vector<std::string> unit_ids_;
    std::vector<std::map<std::size_t, std::vector<double>>> per_unit_;
};

/// Delta equity SBA over net sensitivities (one entry per bucket, length
/// N_b each): weighted sensitivities WS = w_b * s, intra-bucket K_b (with the
/// absolute-sum rule for the "other" bucket and negative radicands clamped to
/// zero), S_b = sum WS with the cap/floor fallback when the cross-bucket
/// aggregate goes negative, and sqrt of the clamped total.
double sba_delta_eq(const std::vector<std::vector<double>>& net_sensitivities,
                    const SbaParams& params);

/// Convenience: net the coalition then aggregate.
double sba_delta_eq(const SensitivitySet& sensitivities, Coalition coalition,
                    const SbaParams& params);

}  // namespace riskalloc
