#pragma once

#include <string>
#include <vector>

#include "riskalloc/bench.hpp"
#include "riskalloc/exposures.hpp"
#include "riskalloc/multilevel.hpp"
#include "riskalloc/result.hpp"
#include "riskalloc/sba.hpp"
#include "riskalloc/shapley_mc.hpp"

namespace riskalloc {

/// Scenario CSV: header `unit_id,s1,...,sm`, one unit per line, '.' decimal
/// point, no thousands separators. Parse errors carry row/column locations.
ExposurePanel load_panel_csv(const std::string& path);
void write_panel_csv(const ExposurePanel& panel, const std::string& path);

/// Hierarchy JSON: internal nodes {"label": str, "children": [...]},
/// leaves {"label": str, "units": [int, ...]}.
Hierarchy load_hierarchy_json(const std::string& path);

/// SBA parameter JSON with keys bucket_count, other_bucket (1-based),
/// risk_weights, intra_corr (array of square matrices), cross_corr.
SbaParams load_sba_params_json(const std::string& path);

/// Sensitivity CSV: `unit_id,bucket,factor,sensitivity` with 1-based bucket
/// and factor indices. Factor dimensions must match the parameter file.
SensitivitySet load_sensitivities_csv(const std::string& path,
                                      const SbaParams& params);

/// Allocation results: CSV columns
/// `unit_id,strategy,allocation,std_error,full_allocation_gap` (std_error
/// blank for non-MC strategies; the gap repeats the result-level value) and
/// a JSON object with the same content.
void write_result_csv(const AllocationResult& result,
                      const std::vector<std::string>& unit_ids,
                      const std::string& path);
void write_result_json(const AllocationResult& result,
                       const std::vector<std::string>& unit_ids,
                       const std::string& path);

/// Multi-level results: flat CSV `node_path,method,allocation` and a JSON
/// tree mirroring the hierarchy (with consistency gaps).
void write_multilevel_csv(const MultiLevelResult& result, const std::string& path);
void write_multilevel_json(const MultiLevelResult& result, const std::string& path);

/// MC trace CSV: `pairs,unit_id,estimate,std_error`.
void write_trace_csv(const std::vector<TraceRow>& rows,
                     const std::vector<std::string>& unit_ids,
                     const std::string& path);

/// Sample-size sweep CSV: `m,unit_id,estimate`.
struct SweepRow {
    std::uint64_t scenarios = 0;
    std::vector<double> estimates;
};
void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::vector<std::string>& unit_ids,
                     const std::string& path);

/// Bench CSV: `n,strategy,evals,median_seconds`.
void write_bench_csv(const std::vector<ScalingRow>& rows, const std::string& path);

/// Atomic text write: temp file in the same directory, then rename. Never
/// leaves a partial output behind.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace riskalloc
