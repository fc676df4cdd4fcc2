// Copyright 2026 The cfmaps Authors.
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

#pragma once

#include "cfmaps/qmaps.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace cfmaps {

/// Tangent fields are transferred from R to P (the pair convention of
/// fmaps.hpp: C and Q map coefficients on R to coefficients on P).

/// Y = Psi_P Q Psi_R^* A_R X.
VectorXc transfer_complex(const MatrixXc& Q, const VectorXc& X, const ShapeData& P,
                          const ShapeData& R);

struct HodgeDecomposition {
  VectorXd f;  ///< X ~ grad f + i grad g
  VectorXd g;
  double residual = 0.0;  ///< ||X - grad f - i grad g||_A / ||X||_A
};

HodgeDecomposition hodge_decompose(const VectorXc& X, const ShapeData& shape,
                                   double ridge = 1e-10);

struct HodgeOptions {
  double ridge = 1e-10;
  double harmonic_tolerance = 0.1;  ///< warn above this relative residual
};

/// Decomposes X, maps the coefficients of f and g with C and reassembles
/// grad(Cf) + i grad(Cg) on P.
VectorXc transfer_hodge(const MatrixXd& C, const VectorXc& X, const ShapeData& P,
                        const ShapeData& R, const HodgeOptions& options = {});

/// Y = Psi_P y minimizing ||D_Y C - C D_X||_F^2 over y in C^{k_P}.
VectorXc transfer_operator_lsq(const MatrixXd& C, const VectorXc& X, const ShapeData& P,
                               const ShapeData& R, double ridge = 1e-8);

enum class NoiseKind { none, random, symmetric };

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double level = 0.0;  ///< s for random noise, a for symmetric mixing
  std::uint64_t seed = 0;
};

std::string to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

/// random: C + U[-s, s] entries; symmetric: a C + (1 - a) C_sym.
MatrixXd make_noisy_fmap(const MatrixXd& C_gt, const NoiseModel& model,
                         const MatrixXd* C_sym = nullptr);

/// Complex spectral coefficients with random phase and magnitude 1/(1 + lambda).
VectorXc random_smooth_field(const ComplexSpectralBasis& basis, std::uint64_t seed,
                             int count = 0);

/// Gradient of one extrinsic coordinate (0 = x).
VectorXc coordinate_gradient_field(const ShapeData& shape, int axis = 0);

/// Y_p = q_p X_{map(p)}.
VectorXc pushforward_field(const VectorXc& q, const PointMap& map, const VectorXc& X);

/// Y_p = tangential part of M (X in ambient coordinates at map(p)).
VectorXc pushforward_ambient(const Eigen::Matrix3d& M, const PointMap& map, const VectorXc& X,
                             const TangentFrames& P, const TangentFrames& R);

/// ||Y - Y_gt||_{A_P} / ||X||_{A_R}.
double transfer_error(const VectorXc& Y, const VectorXc& Y_gt, const VectorXc& X,
                      const VectorXd& mass_P, const VectorXd& mass_R);

struct TransferRecord {
  std::string pair;
  std::string method;
  std::string noise_kind;
  double level = 0.0;
  int k = 0;
  double error = 0.0;
};

void write_transfer_csv(std::ostream& out, const std::vector<TransferRecord>& records);

}  // namespace cfmaps
