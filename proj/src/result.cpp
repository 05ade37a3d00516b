#include "riskalloc/result.hpp"

#include <cmath>

#include "riskalloc/errors.hpp"

namespace riskalloc {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::standalone: return "standalone";
        case Strategy::proportional: return "proportional";
        case Strategy::marginal: return "marginal";
        case Strategy::shapley: return "shapley";
        case Strategy::shapley_mc: return "shapley-mc";
        case Strategy::liu_abs: return "liu-abs";
        case Strategy::liu_max: return "liu-max";
        case Strategy::euler_std: return "euler-std";
        case Strategy::euler_es: return "euler-es";
        case Strategy::euler_var_first: return "euler-var1";
        case Strategy::euler_var_second: return "euler-var2";
        case Strategy::euler_var_kernel: return "euler-var-kernel";
    }
    return "?";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
    static const std::pair<const char*, Strategy> table[] = {
        {"standalone", Strategy::standalone},
        {"proportional", Strategy::proportional},
        {"marginal", Strategy::marginal},
        {"shapley", Strategy::shapley},
        {"shapley-mc", Strategy::shapley_mc},
        {"liu-abs", Strategy::liu_abs},
        {"liu-max", Strategy::liu_max},
        {"euler-std", Strategy::euler_std},
        {"euler-es", Strategy::euler_es},
        {"euler-var1", Strategy::euler_var_first},
        {"euler-var2", Strategy::euler_var_second},
        {"euler-var-kernel", Strategy::euler_var_kernel},
    };
    for (const auto& [n, s] : table)
        if (name == n) return s;
    return std::nullopt;
}

std::string repair_name(RepairMethod m) {
    return m == RepairMethod::max_proportional ? "max-prop" : "abs-prop";
}

double AllocationResult::allocation_sum() const {
    double sum = 0.0;
    for (double k : allocations) sum += k;
    return sum;
}

std::string AllocationResult::label() const {
    std::string out = strategy_name(strategy);
    if (repair) out += "+" + repair_name(*repair);
    return out;
}

AllocationResult make_result(Strategy strategy, std::vector<double> allocations,
                             double total, bool fair) {
    AllocationResult r;
    r.strategy = strategy;
    r.allocations = std::move(allocations);
    r.total = total;
    r.fair = fair;
    if (fair) {
        const double gap = std::abs(r.full_allocation_gap());
        require(gap <= 1e-9 * std::max(1.0, std::abs(total)), ErrorCode::degenerate,
                "full allocation violated for " + strategy_name(strategy) +
                    " (gap " + std::to_string(gap) + ")");
    }
    return r;
}

}  // namespace riskalloc
