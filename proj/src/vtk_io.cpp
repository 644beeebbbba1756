#include <cstdio>
#include <fstream>
#include <sstream>

#include "polyhex/io.hpp"

namespace polyhex {

void save_hex_mesh(const HexMesh& mesh, const std::string& path,
                   const std::vector<double>* scaled_jacobian) {
    if (mesh.elements.empty()) throw MeshError("empty mesh");
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write '" + path + "'");
    out << "# vtk DataFile Version 3.0\npolyhex hex mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    out << "CELLS " << mesh.num_elements() << ' ' << mesh.num_elements() * 9 << '\n';
    for (const auto& e : mesh.elements) {
        out << 8;
        for (int v : e) out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_elements() << '\n';
    for (int i = 0; i < mesh.num_elements(); ++i) out << "12\n";
    if (scaled_jacobian) {
        out << "CELL_DATA " << mesh.num_elements() << '\n';
        out << "SCALARS scaled_jacobian double 1\nLOOKUP_TABLE default\n";
        for (double sj : *scaled_jacobian) {
            std::snprintf(buf, sizeof buf, "%.9g\n", sj);
            out << buf;
        }
    }
}

HexMesh load_hex_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open '" + path + "'");
    HexMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "POINTS") {
            int n;
            std::string type;
            ss >> n >> type;
            mesh.vertices.resize(n);
            for (int i = 0; i < n; ++i)
                in >> mesh.vertices[i].x() >> mesh.vertices[i].y() >> mesh.vertices[i].z();
        } else if (tag == "CELLS") {
            int n, total;
            ss >> n >> total;
            mesh.elements.resize(n);
            for (int i = 0; i < n; ++i) {
                int cnt;
                in >> cnt;
                if (cnt != 8) throw MeshError("cell " + std::to_string(i) + " is not a hexahedron");
                for (int j = 0; j < 8; ++j) in >> mesh.elements[i][j];
            }
        } else if (tag == "CELL_TYPES") {
            int n;
            ss >> n;
            for (int i = 0; i < n; ++i) {
                int t;
                in >> t;
                if (t != 12) throw MeshError("cell type " + std::to_string(t) + " is not hexahedron");
            }
        }
    }
    if (mesh.elements.empty()) throw MeshError("no hexahedra in '" + path + "'");
    mesh.validate();
    return mesh;
}

}  // namespace polyhex
