#include <fstream>
#include <iostream>
#include <sstream>

#include "polyhex/io.hpp"

namespace polyhex {

namespace {
// "7", "7/2", "7//3", "7/2/3" -> vertex index (1-based, may be negative)
int parse_obj_index(const std::string& tok, int nverts) {
    int idx = std::stoi(tok.substr(0, tok.find('/')));
    if (idx < 0) idx = nverts + idx + 1;
    return idx - 1;
}
}  // namespace

TriMesh load_tri_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open '" + path + "'");
    TriMesh mesh;
    std::string line;
    int lineno = 0;
    bool warned = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x() >> p.y() >> p.z()))
                throw MeshError("parse failure at line " + std::to_string(lineno));
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) idx.push_back(parse_obj_index(tok, mesh.num_vertices()));
            if (idx.size() != 3)
                throw MeshError("non-triangle face at line " + std::to_string(lineno));
            mesh.faces.push_back({idx[0], idx[1], idx[2]});
        } else if (!warned) {
            std::cerr << "warning: ignoring OBJ record '" << tag << "' (and any further non-v/f records)\n";
            warned = true;
        }
    }
    mesh.validate();
    return mesh;
}

void save_tri_mesh(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write '" + path + "'");
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace polyhex
