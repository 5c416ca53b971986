#pragma once

#include <cstdint>

#include "specmarket/model.hpp"

namespace specmarket::detail {

enum class PathKind { linear, speculative };

/// One period's exogenous draws. Every source is drawn every period from
/// its own substream whether or not it ends up being used.
struct Shocks {
    bool news = false;
    double dividend = 0.0;
    double eps_I = 0.0;
    double eps_II = 0.0;
    double n_I = 0.0;
    double n_II = 0.0;
};

class ShockSource {
public:
    explicit ShockSource(std::uint64_t seed);
    Shocks draw(const ModelParams& prm, double d_prev);

private:
    Engine dividends_;
    Engine news_;
    Engine weight_I_;
    Engine weight_II_;
    Engine shock_I_;
    Engine shock_II_;
};

struct PathState {
    double p;
    double r;
    double d;
    double d_e;
    double v_e;
    double r_e;
};

struct ReturnStep {
    double r;
    double price;
    bool clamped;
};

/// Return and next price for the aggregate linear law, honoring the
/// configured mispricing timing and price floor. When the floor binds the
/// recorded return is the realized one, floor / p_prev - 1.
ReturnStep linear_return(const ModelParams& prm, double n_I, double r_e, double n_II, double v_e,
                         double p_prev);

void record_or_throw(SimulationPath& path, std::size_t i, const PathState& st);

SimulationPath run_path(const ModelParams& prm, std::uint64_t seed, PathKind kind);

} // namespace specmarket::detail
