#pragma once

#include <cstdint>
#include <vector>

#include "poolsim/ledger.hpp"

namespace poolsim {

struct Beacon {
    uint64_t seed = 0;
};

// SplitMix64 finalizer over seed + (round+1)*golden-gamma. Stable documented
// algorithm; same (seed, round) always yields the same rho.
uint64_t draw_randomness(const Beacon& beacon, int64_t round);

// pools must be non-empty and sorted canonically (lexicographic pool name);
// returns pools[rho mod |pools|]. Throws std::invalid_argument on empty list.
PoolName select_pool_for_audit(uint64_t rho, const std::vector<PoolName>& pools);

// Marks the pool dissolved, deactivates its delegations and records the
// dissolution in history. Throws std::invalid_argument on unknown or
// already-dissolved pools.
LedgerState dissolve_pool(const LedgerState& state, const PoolName& pool);
void dissolve_pool_in_place(LedgerState& state, const PoolName& pool);

} // namespace poolsim
