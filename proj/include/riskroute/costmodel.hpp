#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "riskroute/route.hpp"
#include "riskroute/types.hpp"

namespace riskroute {

enum class Model { primary, guardian };

/// Dollars per token for each leg. Prices are configuration inputs, never
/// fetched.
struct PriceSheet {
    double primary_in_price = 0.0;
    double primary_out_price = 0.0;
    double guardian_in_price = 0.0;
    double guardian_out_price = 0.0;
};

/// Costs are accumulated as integer picodollars (1e-12 $) so aggregates stay
/// exact and price scaling is bit-exact. One picodollar per token resolves
/// price sheets down to $1e-12/token, far below any published rate.
using Picodollars = std::int64_t;

Picodollars picodollars_per_token(double dollars_per_token);
double to_dollars(Picodollars pico);

/// cost = c_in * t_in + c_out * t_out for the named model.
/// Throws InvalidInputError when the model's counts are missing.
Picodollars single_cost_pico(const TokenCounts& tokens, const PriceSheet& prices, Model model);
double single_cost(const TokenCounts& tokens, const PriceSheet& prices, Model model);

/// floor(full_in * (0.5 + 0.5 * m / n)): the conservative estimate of the
/// prompt tokens a guardian sees when only m of n options are forwarded.
/// Computed in exact integer arithmetic. Requires 1 <= m <= n.
std::uint64_t hybrid_input_tokens(std::uint64_t full_in, std::size_t m, std::size_t n);

/// Primary cost always; plus the guardian estimate (hybrid prompt leg, full
/// completion leg) when the decision deferred.
Picodollars routed_cost_pico(const TokenCounts& tokens, const PriceSheet& prices,
                             const RoutingDecision& decision);
double routed_cost(const TokenCounts& tokens, const PriceSheet& prices,
                   const RoutingDecision& decision);

/// Flat key-value text: `primary_in_price = 1e-07` etc., '#' comments allowed.
PriceSheet load_price_sheet(const std::filesystem::path& path);
void save_price_sheet(const std::filesystem::path& path, const PriceSheet& prices);

}  // namespace riskroute
