#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "riskalloc/exposures.hpp"
#include "riskalloc/measures.hpp"
#include "riskalloc/sba.hpp"

namespace riskalloc {

/// Maps coalitions to risk-measure values. v(empty) = 0 by definition and is
/// never counted as an evaluation. Values are memoized so strategies sharing
/// one instance reuse each other's evaluations; the raw evaluation counter
/// advances once per actual measure computation.
class CoalitionValueFn {
  public:
    virtual ~CoalitionValueFn() = default;

    std::size_t n() const { return n_; }

    /// Canonical (memoized) value: aggregation in increasing unit index
    /// order, then the measure.
    double value(Coalition c);

    double grand_value() { return value(Coalition::grand(n_)); }

    std::uint64_t eval_count() const { return evals_.load(std::memory_order_relaxed); }

    /// Incremental evaluator for permutation sweeps: units are added one at a
    /// time and the measure is taken on the running aggregate. Uncached — a
    /// sweep's coalitions practically never repeat, and keeping the Monte
    /// Carlo path free of shared mutable state is what makes results
    /// bit-identical for any worker count.
    class Accumulator {
      public:
        virtual ~Accumulator() = default;
        virtual void reset() = 0;
        virtual void add_unit(std::size_t i) = 0;
        virtual double measure() = 0;
    };
    virtual std::unique_ptr<Accumulator> accumulator() = 0;

    /// Values of every subset of {0..n-1}, indexed by coalition bits
    /// (table[0] = 0). Computed once, depth-first, with one aggregation step
    /// per subset; when threads > 1 the top-level branches run in parallel
    /// and every slot is still produced by exactly one deterministic
    /// computation. Later value() calls are served from this table, so
    /// strategies run after an exact Shapley pass reuse its evaluations.
    const std::vector<double>& all_values(int threads);

  protected:
    explicit CoalitionValueFn(std::size_t n);

    virtual double compute(Coalition c) = 0;
    virtual void fill_all(std::span<double> table, int threads) = 0;
    double counted_compute(Coalition c);

    std::size_t n_;
    std::atomic<std::uint64_t> evals_{0};

  private:
    std::mutex memo_mutex_;
    std::unordered_map<std::uint64_t, double> memo_;
    std::vector<double> full_table_;
    std::atomic<bool> full_table_ready_{false};
};

/// Coalition values over an exposure panel under a scenario-based measure
/// (Std / VaR / ES / VaR+sVaR).
class PanelValueFn final : public CoalitionValueFn {
  public:
    PanelValueFn(std::shared_ptr<const ExposurePanel> panel, RiskMeasureSpec measure);

    const ExposurePanel& panel() const { return *panel_; }
    const RiskMeasureSpec& measure_spec() const { return measure_; }

    std::unique_ptr<Accumulator> accumulator() override;

  protected:
    double compute(Coalition c) override;
    void fill_all(std::span<double> table, int threads) override;

  private:
    double measure_of(std::span<const double> agg,
                      std::span<const double> agg_stressed) const;

    std::shared_ptr<const ExposurePanel> panel_;
    RiskMeasureSpec measure_;
    class Acc;
};

/// Coalition values over netted sensitivities under the delta-equity SBA.
class SbaValueFn final : public CoalitionValueFn {
  public:
    SbaValueFn(std::shared_ptr<const SensitivitySet> sensitivities,
               std::shared_ptr<const SbaParams> params);

    std::unique_ptr<Accumulator> accumulator() override;

  protected:
    double compute(Coalition c) override;
    void fill_all(std::span<double> table, int threads) override;

  private:
    std::shared_ptr<const SensitivitySet> sensitivities_;
    std::shared_ptr<const SbaParams> params_;
    class Acc;
};

/// An allocation problem: a set of risk units plus the machinery to price
/// coalitions, regroupable for hierarchy levels and sub-scopes.
class AllocationProblem {
  public:
    virtual ~AllocationProblem() = default;
    virtual std::size_t unit_count() const = 0;
    virtual const std::vector<std::string>& unit_ids() const = 0;
    virtual std::shared_ptr<CoalitionValueFn> value_fn() const = 0;
    /// Sub-problem whose units are the given groups of this problem's units.
    /// The union may be a strict subset (scope-restricted sub-problems).
    virtual std::unique_ptr<AllocationProblem> regrouped(
        const std::vector<std::vector<int>>& groups,
        const std::vector<std::string>& group_ids) const = 0;
    /// Panel-backed problems expose their panel for the per-row strategies.
    virtual const ExposurePanel* panel() const { return nullptr; }
    virtual const RiskMeasureSpec* measure_spec() const { return nullptr; }
};

class PanelProblem final : public AllocationProblem {
  public:
    PanelProblem(std::shared_ptr<const ExposurePanel> panel, RiskMeasureSpec measure);

    std::size_t unit_count() const override { return panel_->units(); }
    const std::vector<std::string>& unit_ids() const override {
        return panel_->unit_ids();
    }
    std::shared_ptr<CoalitionValueFn> value_fn() const override;
    std::unique_ptr<AllocationProblem> regrouped(
        const std::vector<std::vector<int>>& groups,
        const std::vector<std::string>& group_ids) const override;
    const ExposurePanel* panel() const override { return panel_.get(); }
    const RiskMeasureSpec* measure_spec() const override { return &measure_; }

  private:
    std::shared_ptr<const ExposurePanel> panel_;
    RiskMeasureSpec measure_;
    mutable std::shared_ptr<CoalitionValueFn> cached_vf_;
};

class SbaProblem final : public AllocationProblem {
  public:
    SbaProblem(std::shared_ptr<const SensitivitySet> sensitivities,
               std::shared_ptr<const SbaParams> params);

    std::size_t unit_count() const override { return sensitivities_->units(); }
    const std::vector<std::string>& unit_ids() const override {
        return sensitivities_->unit_ids();
    }
    std::shared_ptr<CoalitionValueFn> value_fn() const override;
    std::unique_ptr<AllocationProblem> regrouped(
        const std::vector<std::vector<int>>& groups,
        const std::vector<std::string>& group_ids) const override;

  private:
    std::shared_ptr<const SensitivitySet> sensitivities_;
    std::shared_ptr<const SbaParams> params_;
    mutable std::shared_ptr<CoalitionValueFn> cached_vf_;
};

}  // namespace riskalloc
