#include "poolsim/beacon.hpp"

#include <stdexcept>

namespace poolsim {

uint64_t draw_randomness(const Beacon& beacon, int64_t round) {
    if (round < 0) throw std::invalid_argument("round must be non-negative");
    uint64_t z = beacon.seed + (static_cast<uint64_t>(round) + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

PoolName select_pool_for_audit(uint64_t rho, const std::vector<PoolName>& pools) {
    if (pools.empty()) throw std::invalid_argument("empty pool list");
    return pools[rho % pools.size()];
}

void dissolve_pool_in_place(LedgerState& state, const PoolName& pool) {
    auto it = state.pools.find(pool);
    if (it == state.pools.end()) throw std::invalid_argument("unknown pool: " + pool);
    if (it->second.dissolved) throw std::invalid_argument("pool already dissolved: " + pool);
    apply_event_in_place(state, LedgerEvent{Dissolution{pool}});
}

LedgerState dissolve_pool(const LedgerState& state, const PoolName& pool) {
    LedgerState next = state;
    dissolve_pool_in_place(next, pool);
    return next;
}

} // namespace poolsim
