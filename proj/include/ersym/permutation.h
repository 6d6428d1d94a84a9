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

#ifndef ERSYM_PERMUTATION_H_
#define ERSYM_PERMUTATION_H_

#include <cstdint>
#include <vector>

namespace ersym {

// A permutation of {0, ..., n-1} in one-line notation: p[x] is the image of x.
using Perm = std::vector<int>;

Perm IdentityPerm(int n);
bool IsPermutation(const Perm& p);
// (p o q)(x) = p(q(x)).
Perm ComposePerm(const Perm& p, const Perm& q);
Perm InversePerm(const Perm& p);
bool IsIdentityPerm(const Perm& p);

// All permutations of n elements in lexicographic order. Throws CapExceeded
// if n! > cap.
std::vector<Perm> AllPermutations(int n, int64_t cap);
// All transpositions (x y), x < y, in lexicographic order of (x, y).
std::vector<Perm> AllTranspositions(int n);

// n!, saturating at INT64_MAX.
int64_t Factorial(int n);

}  // namespace ersym

#endif  // ERSYM_PERMUTATION_H_
