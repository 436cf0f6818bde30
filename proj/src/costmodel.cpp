#include "riskroute/costmodel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "riskroute/errors.hpp"

namespace riskroute {

namespace {

constexpr double kPicoPerDollar = 1e12;

std::uint64_t require_count(const std::optional<std::uint64_t>& count, const char* name) {
    if (!count) throw InvalidInputError(std::string("token count '") + name + "' is missing");
    return *count;
}

Picodollars leg_cost(Picodollars price_per_token, std::uint64_t tokens) {
    return price_per_token * static_cast<Picodollars>(tokens);
}

}  // namespace

Picodollars picodollars_per_token(double dollars_per_token) {
    if (!(dollars_per_token >= 0.0) || !std::isfinite(dollars_per_token)) {
        throw InvalidInputError("price must be a non-negative finite dollar amount");
    }
    const double pico = dollars_per_token * kPicoPerDollar;
    if (pico > 9e18) throw InvalidInputError("price too large");
    return static_cast<Picodollars>(std::llround(pico));
}

double to_dollars(Picodollars pico) {
    return static_cast<double>(pico) / kPicoPerDollar;
}

Picodollars single_cost_pico(const TokenCounts& tokens, const PriceSheet& prices, Model model) {
    if (model == Model::primary) {
        return leg_cost(picodollars_per_token(prices.primary_in_price),
                        require_count(tokens.primary_in, "primary_in")) +
               leg_cost(picodollars_per_token(prices.primary_out_price),
                        require_count(tokens.primary_out, "primary_out"));
    }
    return leg_cost(picodollars_per_token(prices.guardian_in_price),
                    require_count(tokens.guardian_in, "guardian_in")) +
           leg_cost(picodollars_per_token(prices.guardian_out_price),
                    require_count(tokens.guardian_out, "guardian_out"));
}

double single_cost(const TokenCounts& tokens, const PriceSheet& prices, Model model) {
    return to_dollars(single_cost_pico(tokens, prices, model));
}

std::uint64_t hybrid_input_tokens(std::uint64_t full_in, std::size_t m, std::size_t n) {
    if (m < 1 || m > n) {
        throw InvalidInputError("hybrid_input_tokens: need 1 <= m <= n, got m=" + std::to_string(m) +
                                " n=" + std::to_string(n));
    }
    // full_in * (0.5 + 0.5*m/n) == full_in * (n+m) / (2n); integer division
    // is the floor for non-negative operands.
    const auto wide = static_cast<unsigned __int128>(full_in) * (n + m);
    return static_cast<std::uint64_t>(wide / (2 * static_cast<unsigned __int128>(n)));
}

Picodollars routed_cost_pico(const TokenCounts& tokens, const PriceSheet& prices,
                             const RoutingDecision& decision) {
    Picodollars total = single_cost_pico(tokens, prices, Model::primary);
    if (decision.deferred) {
        const std::uint64_t full_in = require_count(tokens.full_in, "full_in");
        const std::uint64_t prompt =
            hybrid_input_tokens(full_in, decision.menu_count, decision.action_count);
        total += leg_cost(picodollars_per_token(prices.guardian_in_price), prompt);
        total += leg_cost(picodollars_per_token(prices.guardian_out_price),
                          require_count(tokens.guardian_out, "guardian_out"));
    }
    return total;
}

double routed_cost(const TokenCounts& tokens, const PriceSheet& prices,
                   const RoutingDecision& decision) {
    return to_dollars(routed_cost_pico(tokens, prices, decision));
}

PriceSheet load_price_sheet(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open price sheet: " + path.string());

    std::map<std::string, double> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;  // blank line
        std::string token;
        if (!(ss >> token)) {
            throw SchemaError(line_no, key, "expected '<key> = <dollars per token>'");
        }
        if (token == "=" && !(ss >> token)) {
            throw SchemaError(line_no, key, "expected a value after '='");
        }
        double value = 0.0;
        std::istringstream vs(token);
        if (!(vs >> value) || !vs.eof()) {
            throw SchemaError(line_no, key, "value '" + token + "' is not a number");
        }
        entries[key] = value;
    }

    PriceSheet sheet;
    const auto take = [&](const char* key, double& field) {
        auto it = entries.find(key);
        if (it == entries.end()) {
            throw InvalidInputError("price sheet missing key '" + std::string(key) + "'");
        }
        if (!(it->second >= 0.0)) {
            throw InvalidInputError("price sheet key '" + std::string(key) + "' must be >= 0");
        }
        field = it->second;
        entries.erase(it);
    };
    take("primary_in_price", sheet.primary_in_price);
    take("primary_out_price", sheet.primary_out_price);
    take("guardian_in_price", sheet.guardian_in_price);
    take("guardian_out_price", sheet.guardian_out_price);
    if (!entries.empty()) {
        throw InvalidInputError("price sheet has unknown key '" + entries.begin()->first + "'");
    }
    return sheet;
}

void save_price_sheet(const std::filesystem::path& path, const PriceSheet& prices) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write price sheet: " + path.string());
    out.precision(17);
    out << "primary_in_price = " << prices.primary_in_price << "\n"
        << "primary_out_price = " << prices.primary_out_price << "\n"
        << "guardian_in_price = " << prices.guardian_in_price << "\n"
        << "guardian_out_price = " << prices.guardian_out_price << "\n";
}

}  // namespace riskroute
