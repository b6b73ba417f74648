#pragma once

#include "dirac/accelerant.hpp"
#include "dirac/core.hpp"

#include <vector>

namespace dirac {

struct KreinSolution {
  TriangularKernel R;                 // r x r blocks on the lower triangle
  std::vector<double> row_residuals;  // relative residual of each row system
  double max_residual = 0.0;
  bool used_fallback = false;         // fast path delegated to the dense solver
};

/// Per-row Nystrom solve of the Krein equation
///   R(x,t) + H(x-t) + integral_0^x R(x,s) H(s-t) ds = 0 on 0 <= t <= x <= 1,
/// trapezoid weights, dense LU per row.  Rows are independent.
KreinSolution krein_solve_dense(const Accelerant& H, const UniformGrid& grid01);

/// Same contract as krein_solve_dense; exploits the convolution structure.
/// Each row system is block Toeplitz plus a rank-2r endpoint-weight
/// correction, so a block Levinson recursion shared across consecutive rows
/// plus a Woodbury step per row replaces the dense LU.  A growth monitor
/// falls back to the dense solver if the recursion loses stability.
KreinSolution krein_solve_fast(const Accelerant& H, const UniformGrid& grid01);

/// q = Theta(H) = i R_H(., 0), sampled on the solution grid.
Potential theta(const KreinSolution& R);

struct GlmSolution {
  TriangularKernel L;  // 2r x 2r blocks
  std::vector<double> row_residuals;
  double max_residual = 0.0;
};

/// Per-row Nystrom solve of the GLM equation
///   L(x,t) + F(x,t) + integral_0^x L(x,s) F(s,t) ds = 0 on the triangle.
GlmSolution glm_solve(const BlockKernelF& F, const UniformGrid& grid01);

/// L assembled from the Krein solutions for H and H-sharp:
///   L(x,t) = (1/2) [ R_H(x,(x+t)/2)   R_H(x,(x-t)/2)  ]
///            [ Rs(x,(x-t)/2)     Rs(x,(x+t)/2)   ],  Rs = R_{H-sharp}.
/// The Krein systems are solved on the half-step grid so every sample point
/// (x_i +- t_k)/2 is a node and the assembled L satisfies the discrete GLM
/// equation on grid01 exactly.
GlmSolution glm_from_krein(const Accelerant& H, const UniformGrid& grid01, bool fast = true);

/// max over triangle nodes of the discrete GLM equation residual of L.
double glm_residual(const TriangularKernel& L, const BlockKernelF& F);

/// max over triangle nodes of the discrete Krein equation residual of R.
double krein_residual(const TriangularKernel& R, const Accelerant& H);

struct FactorizationReport {
  double residual = 0.0;  // operator norm of (I+L)(I+F)(I+L*) - I
};

/// Discretizes the factorization identity of the reconstruction theory:
/// with L the GLM solution, (I+L)(I+F_H)(I+L*) should be the identity.
FactorizationReport factorization_check(const GlmSolution& L, const BlockKernelF& F);

}  // namespace dirac
