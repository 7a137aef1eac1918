/*
 * Copyright 2026 The poiconflate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "poi/rng.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace poi {

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n,
                                                         std::size_t k) {
  if (k > n) {
    k = n;
  }
  if (k == 0) {
    return {};
  }
  // Partial Fisher-Yates when the sample is a large fraction of the
  // population; otherwise rejection sampling is cheaper.
  if (k * 3 >= n) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }
  std::unordered_set<std::size_t> seen;
  std::vector<std::size_t> out;
  out.reserve(k);
  while (out.size() < k) {
    const std::size_t candidate = static_cast<std::size_t>(bounded(n));
    if (seen.insert(candidate).second) {
      out.push_back(candidate);
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& salt) {
  // FNV-1a over the salt, mixed into the parent seed, then one splitmix64
  // scramble so nearby parent seeds do not produce nearby children.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : salt) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  Rng mixer(seed ^ h);
  return mixer.next_u64();
}

}  // namespace poi
