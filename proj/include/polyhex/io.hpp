#pragma once

#include "polyhex/hex_mesh.hpp"
#include "polyhex/tri_mesh.hpp"

namespace polyhex {

/// Parse a triangle-only OBJ (v/f records; other records are skipped with a
/// warning on stderr). Validates manifoldness.
TriMesh load_tri_mesh(const std::string& path);
void save_tri_mesh(const TriMesh& mesh, const std::string& path);

/// Legacy-ASCII VTK unstructured grid, CELL_TYPES 12. Coordinates are written
/// with 9 significant digits. Optional per-element scaled-Jacobian scalar.
void save_hex_mesh(const HexMesh& mesh, const std::string& path,
                   const std::vector<double>* scaled_jacobian = nullptr);
HexMesh load_hex_mesh(const std::string& path);

}  // namespace polyhex
