#ifndef SDOPT_VTK_HPP
#define SDOPT_VTK_HPP

#include <iosfwd>

#include "sdopt/mesh.hpp"
#include "sdopt/spaces.hpp"
#include "sdopt/system.hpp"

namespace sdopt {

/// Dump a solved optimality system as a legacy ASCII VTK unstructured grid:
/// the triangulation with per-cell data sampled at cell centroids
/// (subdomain id, state/adjoint pressure, state/adjoint velocity vectors).
/// Centroid sampling keeps the two-sided fields unambiguous across the
/// interface, where vertex values would be double-valued.
void write_vtk(const Mesh& mesh, const VelocityPair& vel,
               const Space& pressure, const Solution& sol, std::ostream& out);

}  // namespace sdopt

#endif  // SDOPT_VTK_HPP
