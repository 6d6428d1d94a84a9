// Copyright 2026 The ersym Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ersym/permutation.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "ersym/error.h"

namespace ersym {

Perm IdentityPerm(int n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

bool IsPermutation(const Perm& p) {
  std::vector<uint8_t> seen(p.size(), 0);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

Perm ComposePerm(const Perm& p, const Perm& q) {
  if (p.size() != q.size()) {
    throw ValidationError("cannot compose permutations of different sizes");
  }
  Perm r(p.size());
  for (size_t x = 0; x < q.size(); ++x) r[x] = p[q[x]];
  return r;
}

Perm InversePerm(const Perm& p) {
  Perm r(p.size());
  for (size_t x = 0; x < p.size(); ++x) r[p[x]] = static_cast<int>(x);
  return r;
}

bool IsIdentityPerm(const Perm& p) {
  for (size_t x = 0; x < p.size(); ++x) {
    if (p[x] != static_cast<int>(x)) return false;
  }
  return true;
}

int64_t Factorial(int n) {
  int64_t f = 1;
  for (int k = 2; k <= n; ++k) {
    if (f > std::numeric_limits<int64_t>::max() / k) {
      return std::numeric_limits<int64_t>::max();
    }
    f *= k;
  }
  return f;
}

std::vector<Perm> AllPermutations(int n, int64_t cap) {
  if (Factorial(n) > cap) {
    throw CapExceeded(std::to_string(n) + "! permutations exceed the cap of " +
                      std::to_string(cap));
  }
  std::vector<Perm> out;
  Perm p = IdentityPerm(n);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<Perm> AllTranspositions(int n) {
  std::vector<Perm> out;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      Perm p = IdentityPerm(n);
      std::swap(p[x], p[y]);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace ersym
