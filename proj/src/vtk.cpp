#include "sdopt/vtk.hpp"

#include <iomanip>
#include <ostream>

#include "sdopt/fe_function.hpp"
#include "sdopt/types.hpp"

namespace sdopt {

namespace {

// Centroid of the reference triangle.
const Vec2 kCentroid{1.0 / 3.0, 1.0 / 3.0};

void write_cell_scalars(std::ostream& out, const char* name, const Mesh& mesh,
                        const Space& space, const VecX& coeffs) {
  const FeFunction f{&space, coeffs};
  out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    out << eval_scalar(f, t, kCentroid) << '\n';
  }
}

void write_cell_vectors(std::ostream& out, const char* name, const Mesh& mesh,
                        const VelocityPair& vel, const VecX& coeffs) {
  const FeFunction fs{vel.stokes, coeffs.head(vel.darcy_offset())};
  const FeFunction fd{vel.darcy, coeffs.tail(vel.darcy->ndof)};
  out << "VECTORS " << name << " double\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const bool stokes = mesh.tri_subdomain[t] == Subdomain::Stokes;
    const Vec2 v = eval_velocity(stokes ? fs : fd, t, kCentroid);
    out << v.x() << ' ' << v.y() << " 0\n";
  }
}

}  // namespace

void write_vtk(const Mesh& mesh, const VelocityPair& vel,
               const Space& pressure, const Solution& sol,
               std::ostream& out) {
  if (vel.stokes->mesh != &mesh || vel.darcy->mesh != &mesh ||
      pressure.mesh != &mesh) {
    throw ArgumentError("write_vtk: spaces built on a different mesh");
  }
  if (sol.u.size() != vel.ndof() || sol.z.size() != vel.ndof() ||
      sol.p.size() != pressure.ndof || sol.r.size() != pressure.ndof) {
    throw ArgumentError("write_vtk: solution sizes do not match the spaces");
  }
  const int nt = mesh.num_triangles();
  out << "# vtk DataFile Version 3.0\n"
      << "coupled free-flow/porous optimality solution\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(12);
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices) {
    out << v.x() << ' ' << v.y() << " 0\n";
  }
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& tv : mesh.tri_vertices) {
    out << "3 " << tv[0] << ' ' << tv[1] << ' ' << tv[2] << '\n';
  }
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) out << "5\n";

  out << "CELL_DATA " << nt << '\n';
  out << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t) {
    out << static_cast<int>(mesh.tri_subdomain[t]) << '\n';
  }
  write_cell_scalars(out, "pressure_state", mesh, pressure, sol.p);
  write_cell_scalars(out, "pressure_adjoint", mesh, pressure, sol.r);
  write_cell_vectors(out, "velocity_state", mesh, vel, sol.u);
  write_cell_vectors(out, "velocity_adjoint", mesh, vel, sol.z);
}

}  // namespace sdopt
