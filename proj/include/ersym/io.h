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

#ifndef ERSYM_IO_H_
#define ERSYM_IO_H_

#include <string>

#include "json.hpp"

#include "ersym/evaluate.h"
#include "ersym/model.h"
#include "ersym/policy.h"
#include "ersym/symmetry.h"

namespace ersym {

using Json = nlohmann::ordered_json;

// Schema identifiers written into every file.
inline constexpr char kModelSchema[] = "ersym.model/1";
inline constexpr char kPolicySchema[] = "ersym.policy/1";
inline constexpr char kTrajectorySchema[] = "ersym.trajectory/1";
inline constexpr char kSymmetrySetSchema[] = "ersym.symmetry_set/1";

// Canonical serialization; ModelFingerprint hashes its compact dump.
Json ModelToJson(const TabularDecPomdp& model);
TabularDecPomdp ModelFromJson(const Json& j);

// Policies are keyed by (step, history index) with the readable history
// alongside. Only defined entries are written.
Json PolicyToJson(const TabularDecPomdp& model, const TabularJointPolicy& policy);
// Throws ValidationError if the fingerprint does not match `model`.
TabularJointPolicy PolicyFromJson(const TabularDecPomdp& model, const Json& j);

Json TrajectoryToJson(const TabularDecPomdp& model, const Trajectory& traj);

Json SymmetryMapToJson(const SymmetryMap& phi);
SymmetryMap SymmetryMapFromJson(const Json& j);
Json SymmetrySetToJson(const TabularDecPomdp& model, const SymmetrySet& set);
SymmetrySet SymmetrySetFromJson(const TabularDecPomdp& model, const Json& j);

Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& j);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace ersym

#endif  // ERSYM_IO_H_
