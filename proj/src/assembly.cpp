#include "sdopt/assembly.hpp"

#include <cmath>
#include <vector>

#include "sdopt/quadrature.hpp"

namespace sdopt {

namespace {

Vec2 phys_point(const TriGeometry& g, const Vec2& ref) {
  return g.v0 + g.J * ref;
}

void add_local(std::vector<Triplet>& trips, const std::vector<int>& rows,
               const std::vector<int>& cols, const MatX& local) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (local(i, j) != 0.0) {
        trips.emplace_back(rows[i], cols[j], local(i, j));
      }
    }
  }
}

std::vector<int> offset_dofs(const std::vector<int>& dofs, int offset) {
  std::vector<int> out(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) out[i] = dofs[i] + offset;
  return out;
}

}  // namespace

Mat2 eval_permeability(const ProblemData& data, const Vec2& p) {
  Mat2 K = data.K ? data.K(p) : Mat2::Identity();
  const double scale = K.cwiseAbs().maxCoeff();
  if (std::abs(K(0, 1) - K(1, 0)) > 1e-12 * std::max(scale, 1.0) ||
      K.trace() <= 0 || K.determinant() <= 0) {
    throw ArgumentError(
        "permeability tensor is not symmetric positive definite");
  }
  return K;
}

SpMat assemble_a(const Mesh& mesh, const VelocityPair& vel,
                 const ProblemData& data, int tri_degree, int edge_degree) {
  const int n = vel.ndof();
  const int off = vel.darcy_offset();
  std::vector<Triplet> trips;
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  const auto edge_rule = make_quadrature(QuadDomain::Edge, edge_degree);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry g = mesh.tri_geometry(t);
    if (mesh.tri_subdomain[t] == Subdomain::Stokes) {
      // 2μ(D(u), D(v)) with u = φ_j e_d, v = φ_i e_c:
      //   2μ D(φ_j e_d):D(φ_i e_c) = μ(∇φ_i·∇φ_j δ_cd + ∂_c φ_j ∂_d φ_i).
      MatX local = MatX::Zero(14, 14);
      for (std::size_t q = 0; q < tri_rule.size(); ++q) {
        const BasisEval eb = eval_basis(*vel.stokes, t, tri_rule.points[q]);
        const double w = tri_rule.weights[q] * g.det * data.mu;
        for (int i = 0; i < 7; ++i) {
          for (int j = 0; j < 7; ++j) {
            const double dot = eb.gradients.row(i).dot(eb.gradients.row(j));
            for (int c = 0; c < 2; ++c) {
              for (int d = 0; d < 2; ++d) {
                local(2 * i + c, 2 * j + d) +=
                    w * ((c == d ? dot : 0.0) +
                         eb.gradients(j, c) * eb.gradients(i, d));
              }
            }
          }
        }
      }
      add_local(trips, vel.stokes->cell_dofs[t], vel.stokes->cell_dofs[t],
                local);
    } else if (!vel.darcy->cell_dofs[t].empty()) {
      MatX local = MatX::Zero(8, 8);
      for (std::size_t q = 0; q < tri_rule.size(); ++q) {
        const BasisEval eb = eval_basis(*vel.darcy, t, tri_rule.points[q]);
        const Mat2 Kinv =
            eval_permeability(data, phys_point(g, tri_rule.points[q]))
                .inverse();
        const double w = tri_rule.weights[q] * g.det * data.mu;
        local += w * eb.values * Kinv * eb.values.transpose();
      }
      const auto dofs = offset_dofs(vel.darcy->cell_dofs[t], off);
      add_local(trips, dofs, dofs, local);
    }
  }

  // Slip term on the interface, free-flow trace only.
  for (const InterfaceEdge& ie : interface_edges(mesh)) {
    const Vec2 tau = interface_tangent(ie.normal);
    const double len = mesh.edge_length(ie.edge);
    MatX local = MatX::Zero(14, 14);
    for (std::size_t q = 0; q < edge_rule.size(); ++q) {
      const Vec2 x = mesh.edge_point(ie.edge, edge_rule.points[q].x());
      const BasisEval eb =
          eval_basis(*vel.stokes, ie.tri_s, mesh.ref_coords(ie.tri_s, x));
      const double kappa = tau.dot(eval_permeability(data, x) * tau);
      const double w = edge_rule.weights[q] * len * data.alpha1 * data.mu /
                       std::sqrt(kappa);
      for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
          const double vv = w * eb.values(i, 0) * eb.values(j, 0);
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) {
              local(2 * i + c, 2 * j + d) += vv * tau[c] * tau[d];
            }
          }
        }
      }
    }
    add_local(trips, vel.stokes->cell_dofs[ie.tri_s],
              vel.stokes->cell_dofs[ie.tri_s], local);
  }

  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

SpMat assemble_b(const Mesh& mesh, const VelocityPair& vel,
                 const Space& pressure, int tri_degree) {
  std::vector<Triplet> trips;
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  const int off = vel.darcy_offset();

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry g = mesh.tri_geometry(t);
    const bool stokes = mesh.tri_subdomain[t] == Subdomain::Stokes;
    if (!stokes && vel.darcy->cell_dofs[t].empty()) continue;
    const int ncol = stokes ? 14 : 8;
    MatX local = MatX::Zero(3, ncol);
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const BasisEval pb = eval_basis(pressure, t, tri_rule.points[q]);
      const double w = tri_rule.weights[q] * g.det;
      if (stokes) {
        const BasisEval eb = eval_basis(*vel.stokes, t, tri_rule.points[q]);
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 7; ++j) {
            for (int d = 0; d < 2; ++d) {
              local(i, 2 * j + d) -= w * pb.values(i, 0) * eb.gradients(j, d);
            }
          }
        }
      } else {
        const BasisEval eb = eval_basis(*vel.darcy, t, tri_rule.points[q]);
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 8; ++j) {
            local(i, j) -= w * pb.values(i, 0) * eb.divergence[j];
          }
        }
      }
    }
    const auto cols = stokes ? vel.stokes->cell_dofs[t]
                             : offset_dofs(vel.darcy->cell_dofs[t], off);
    add_local(trips, pressure.cell_dofs[t], cols, local);
  }

  SpMat B(pressure.ndof, vel.ndof());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

SpMat assemble_interface_constraint(const Mesh& mesh, const VelocityPair& vel,
                                    const Space& trace, int edge_degree) {
  std::vector<Triplet> trips;
  const auto edge_rule = make_quadrature(QuadDomain::Edge, edge_degree);
  const int off = vel.darcy_offset();

  for (const InterfaceEdge& ie : interface_edges(mesh)) {
    const int k = trace.edge_trace_index[ie.edge];
    const std::vector<int> rows = {2 * k, 2 * k + 1};
    const double len = mesh.edge_length(ie.edge);
    MatX loc_s = MatX::Zero(2, 14);
    MatX loc_d = MatX::Zero(2, 8);
    for (std::size_t q = 0; q < edge_rule.size(); ++q) {
      const double tt = edge_rule.points[q].x();
      const Vec2 x = mesh.edge_point(ie.edge, tt);
      const Vec2 qv = trace_basis(tt);
      const double w = edge_rule.weights[q] * len;
      const BasisEval es =
          eval_basis(*vel.stokes, ie.tri_s, mesh.ref_coords(ie.tri_s, x));
      const BasisEval ed =
          eval_basis(*vel.darcy, ie.tri_d, mesh.ref_coords(ie.tri_d, x));
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 7; ++j) {
          for (int c = 0; c < 2; ++c) {
            loc_s(i, 2 * j + c) +=
                w * qv[i] * es.values(j, 0) * ie.normal[c];
          }
        }
        // The porous-side outward normal is the negative of the stored one.
        for (int j = 0; j < 8; ++j) {
          loc_d(i, j) -= w * qv[i] * ed.values.row(j).dot(ie.normal);
        }
      }
    }
    add_local(trips, rows, vel.stokes->cell_dofs[ie.tri_s], loc_s);
    add_local(trips, rows, offset_dofs(vel.darcy->cell_dofs[ie.tri_d], off),
              loc_d);
  }

  SpMat C(trace.ndof, vel.ndof());
  C.setFromTriplets(trips.begin(), trips.end());
  return C;
}

SpMat assemble_rt_mass(const Mesh& mesh, const Space& rt, int tri_degree) {
  std::vector<Triplet> trips;
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (rt.cell_dofs[t].empty()) continue;
    const TriGeometry g = mesh.tri_geometry(t);
    MatX local = MatX::Zero(8, 8);
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const BasisEval eb = eval_basis(rt, t, tri_rule.points[q]);
      local += tri_rule.weights[q] * g.det * eb.values * eb.values.transpose();
    }
    add_local(trips, rt.cell_dofs[t], rt.cell_dofs[t], local);
  }
  SpMat M(rt.ndof, rt.ndof);
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

VecX assemble_rt_load(const Mesh& mesh, const Space& rt,
                      const std::function<Vec2(const Vec2&)>& field,
                      int tri_degree) {
  VecX L = VecX::Zero(rt.ndof);
  if (!field) return L;
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (rt.cell_dofs[t].empty()) continue;
    const TriGeometry g = mesh.tri_geometry(t);
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const BasisEval eb = eval_basis(rt, t, tri_rule.points[q]);
      const Vec2 fv = field(phys_point(g, tri_rule.points[q]));
      const double w = tri_rule.weights[q] * g.det;
      for (int i = 0; i < 8; ++i) {
        L[rt.cell_dofs[t][i]] += w * eb.values.row(i).dot(fv);
      }
    }
  }
  return L;
}

SpMat assemble_velocity_mass(const Mesh& mesh, const VelocityPair& vel,
                             MassMode mode, const ReconstructionOperator* recon,
                             int tri_degree) {
  if (mode == MassMode::PiWeighted) {
    if (recon == nullptr) {
      throw ArgumentError(
          "assemble_velocity_mass: reconstruction required in weighted mode");
    }
    // M_Y is block diagonal over the two RT target spaces.
    const SpMat Ms = assemble_rt_mass(mesh, recon->rt_stokes, tri_degree);
    const SpMat Md = assemble_rt_mass(mesh, *recon->darcy, tri_degree);
    std::vector<Triplet> trips;
    const int doff = recon->y_darcy_offset();
    for (int k = 0; k < Ms.outerSize(); ++k) {
      for (SpMat::InnerIterator it(Ms, k); it; ++it) {
        trips.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int k = 0; k < Md.outerSize(); ++k) {
      for (SpMat::InnerIterator it(Md, k); it; ++it) {
        trips.emplace_back(it.row() + doff, it.col() + doff, it.value());
      }
    }
    SpMat My(recon->y_ndof, recon->y_ndof);
    My.setFromTriplets(trips.begin(), trips.end());
    return SpMat(recon->Pi.transpose() * My * recon->Pi);
  }

  const int off = vel.darcy_offset();
  std::vector<Triplet> trips;
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tri_subdomain[t] != Subdomain::Stokes) continue;
    const TriGeometry g = mesh.tri_geometry(t);
    MatX local = MatX::Zero(14, 14);
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const BasisEval eb = eval_basis(*vel.stokes, t, tri_rule.points[q]);
      const double w = tri_rule.weights[q] * g.det;
      for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
          const double vv = w * eb.values(i, 0) * eb.values(j, 0);
          local(2 * i, 2 * j) += vv;
          local(2 * i + 1, 2 * j + 1) += vv;
        }
      }
    }
    add_local(trips, vel.stokes->cell_dofs[t], vel.stokes->cell_dofs[t],
              local);
  }
  const SpMat Md = assemble_rt_mass(mesh, *vel.darcy, tri_degree);
  for (int k = 0; k < Md.outerSize(); ++k) {
    for (SpMat::InnerIterator it(Md, k); it; ++it) {
      trips.emplace_back(it.row() + off, it.col() + off, it.value());
    }
  }
  SpMat M(vel.ndof(), vel.ndof());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

VecX assemble_rhs(const Mesh& mesh, const VelocityPair& vel,
                  const ProblemData& data, RhsKind which, TestMode mode,
                  const ReconstructionOperator* recon, int tri_degree,
                  int edge_degree) {
  if (mode == TestMode::Reconstructed && recon == nullptr) {
    throw ArgumentError(
        "assemble_rhs: reconstruction required in reconstructed mode");
  }
  const int off = vel.darcy_offset();
  VecX F = VecX::Zero(vel.ndof());
  const double vol_scale =
      which == RhsKind::State ? 1.0 : -1.0 / std::sqrt(data.alpha);
  const auto& field_s =
      which == RhsKind::State ? data.f_s : data.u_star_s;
  const auto& field_d =
      which == RhsKind::State ? data.f_d : data.u_star_d;

  if (mode == TestMode::Plain) {
    const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const TriGeometry g = mesh.tri_geometry(t);
      if (mesh.tri_subdomain[t] == Subdomain::Stokes) {
        if (!field_s) continue;
        for (std::size_t q = 0; q < tri_rule.size(); ++q) {
          const BasisEval eb = eval_basis(*vel.stokes, t, tri_rule.points[q]);
          const Vec2 fv =
              vol_scale * field_s(phys_point(g, tri_rule.points[q]));
          const double w = tri_rule.weights[q] * g.det;
          for (int i = 0; i < 7; ++i) {
            F[vel.stokes->cell_dofs[t][2 * i]] += w * eb.values(i, 0) * fv.x();
            F[vel.stokes->cell_dofs[t][2 * i + 1]] +=
                w * eb.values(i, 0) * fv.y();
          }
        }
      } else if (!vel.darcy->cell_dofs[t].empty()) {
        if (!field_d) continue;
        for (std::size_t q = 0; q < tri_rule.size(); ++q) {
          const BasisEval eb = eval_basis(*vel.darcy, t, tri_rule.points[q]);
          const Vec2 fv =
              vol_scale * field_d(phys_point(g, tri_rule.points[q]));
          const double w = tri_rule.weights[q] * g.det;
          for (int i = 0; i < 8; ++i) {
            F[off + vel.darcy->cell_dofs[t][i]] +=
                w * eb.values.row(i).dot(fv);
          }
        }
      }
    }
  } else {
    // Volume sources tested against the reconstructed basis: Πᵀ L_Y.
    VecX Ly = VecX::Zero(recon->y_ndof);
    const auto scaled = [vol_scale](const std::function<Vec2(const Vec2&)>& f)
        -> std::function<Vec2(const Vec2&)> {
      if (!f) return {};
      return [vol_scale, f](const Vec2& p) { return Vec2(vol_scale * f(p)); };
    };
    Ly.head(recon->y_darcy_offset()) =
        assemble_rt_load(mesh, recon->rt_stokes, scaled(field_s), tri_degree);
    Ly.tail(recon->darcy->ndof) =
        assemble_rt_load(mesh, *recon->darcy, scaled(field_d), tri_degree);
    F = recon->Pi.transpose() * Ly;
  }

  // Interface residual loads always pair with the plain free-flow trace.
  const auto& jn = which == RhsKind::State ? data.j2 : data.j2z;
  const auto& jt = which == RhsKind::State ? data.j3 : data.j3z;
  if (jn || jt) {
    const auto edge_rule = make_quadrature(QuadDomain::Edge, edge_degree);
    for (const InterfaceEdge& ie : interface_edges(mesh)) {
      const Vec2 tau = interface_tangent(ie.normal);
      const double len = mesh.edge_length(ie.edge);
      const auto& dofs = vel.stokes->cell_dofs[ie.tri_s];
      for (std::size_t q = 0; q < edge_rule.size(); ++q) {
        const Vec2 x = mesh.edge_point(ie.edge, edge_rule.points[q].x());
        const BasisEval eb =
            eval_basis(*vel.stokes, ie.tri_s, mesh.ref_coords(ie.tri_s, x));
        const double w = edge_rule.weights[q] * len;
        const Vec2 load =
            (jn ? jn(x) : 0.0) * ie.normal + (jt ? jt(x) : 0.0) * tau;
        for (int i = 0; i < 7; ++i) {
          F[dofs[2 * i]] += w * eb.values(i, 0) * load.x();
          F[dofs[2 * i + 1]] += w * eb.values(i, 0) * load.y();
        }
      }
    }
  }
  return F;
}

VecX assemble_pressure_integral(const Mesh& mesh, const Space& pressure,
                                int tri_degree) {
  VecX w = VecX::Zero(pressure.ndof);
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const TriGeometry g = mesh.tri_geometry(t);
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const BasisEval eb = eval_basis(pressure, t, tri_rule.points[q]);
      for (int i = 0; i < 3; ++i) {
        w[pressure.cell_dofs[t][i]] +=
            tri_rule.weights[q] * g.det * eb.values(i, 0);
      }
    }
  }
  return w;
}

VecX assemble_pressure_load(const Mesh& mesh, const Space& pressure,
                            const std::function<double(const Vec2&)>& fn_s,
                            const std::function<double(const Vec2&)>& fn_d,
                            int tri_degree) {
  VecX L = VecX::Zero(pressure.ndof);
  const auto tri_rule = make_quadrature(QuadDomain::Triangle, tri_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const bool stokes = mesh.tri_subdomain[t] == Subdomain::Stokes;
    const auto& fn = stokes ? fn_s : fn_d;
    if (!fn) continue;
    const TriGeometry g = mesh.tri_geometry(t);
    for (std::size_t q = 0; q < tri_rule.size(); ++q) {
      const BasisEval eb = eval_basis(pressure, t, tri_rule.points[q]);
      const double fv = fn(phys_point(g, tri_rule.points[q]));
      const double w = tri_rule.weights[q] * g.det;
      for (int i = 0; i < 3; ++i) {
        L[pressure.cell_dofs[t][i]] += w * fv * eb.values(i, 0);
      }
    }
  }
  return L;
}

VecX assemble_trace_load(const Mesh& mesh, const Space& trace,
                         const std::function<double(const Vec2&)>& fn,
                         int edge_degree) {
  VecX L = VecX::Zero(trace.ndof);
  if (!fn) return L;
  const auto edge_rule = make_quadrature(QuadDomain::Edge, edge_degree);
  for (const InterfaceEdge& ie : interface_edges(mesh)) {
    const int k = trace.edge_trace_index[ie.edge];
    const double len = mesh.edge_length(ie.edge);
    for (std::size_t q = 0; q < edge_rule.size(); ++q) {
      const double t = edge_rule.points[q].x();
      const double w = edge_rule.weights[q] * len;
      const double fv = fn(mesh.edge_point(ie.edge, t));
      const Vec2 chi = trace_basis(t);
      L[2 * k] += w * fv * chi[0];
      L[2 * k + 1] += w * fv * chi[1];
    }
  }
  return L;
}

}  // namespace sdopt
