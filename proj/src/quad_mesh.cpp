#include <map>

#include "polyhex/quad_mesh.hpp"

namespace polyhex {

QuadMesh assemble_surface(const PolycubeStructure& pc) {
    QuadMesh m;
    std::map<IVec3, int, IVec3Less> vid;
    auto get_vid = [&](const IVec3& p) {
        auto it = vid.find(p);
        if (it != vid.end()) return it->second;
        int id = m.num_vertices();
        vid[p] = id;
        m.vertices.push_back(p.cast<double>());
        return id;
    };
    for (const auto& face : pc.faces)
        for (const auto& f : face.facets) {
            auto cp = f.corner_points();
            m.quads.push_back({get_vid(cp[0]), get_vid(cp[1]), get_vid(cp[2]), get_vid(cp[3])});
            m.face_tags.push_back(face.id);
        }
    return m;
}

namespace {

QuadMesh subdivide_once(const QuadMesh& in) {
    const int nv = in.num_vertices(), nq = in.num_quads();
    std::map<EdgeKey, int> edge_id;
    std::vector<std::array<int, 2>> edge_quads;
    std::vector<EdgeKey> edge_list;
    for (int q = 0; q < nq; ++q)
        for (int e = 0; e < 4; ++e) {
            EdgeKey k(in.quads[q][e], in.quads[q][(e + 1) % 4]);
            auto it = edge_id.find(k);
            if (it == edge_id.end()) {
                edge_id[k] = static_cast<int>(edge_list.size());
                edge_list.push_back(k);
                edge_quads.push_back({q, -1});
            } else {
                if (edge_quads[it->second][1] != -1) throw MeshError("non-manifold quad edge");
                edge_quads[it->second][1] = q;
            }
        }
    for (const auto& eq : edge_quads)
        if (eq[1] == -1) throw MeshError("quad mesh is not closed");

    const int ne = static_cast<int>(edge_list.size());
    QuadMesh out;
    out.vertices.resize(nv + ne + nq);

    // face points
    std::vector<Vec3> fpt(nq);
    for (int q = 0; q < nq; ++q) {
        Vec3 c = Vec3::Zero();
        for (int v : in.quads[q]) c += in.vertices[v];
        fpt[q] = c / 4.0;
        out.vertices[nv + ne + q] = fpt[q];
    }
    // edge points
    for (int e = 0; e < ne; ++e) {
        const auto& k = edge_list[e];
        const auto& eq = edge_quads[e];
        out.vertices[nv + e] =
            (in.vertices[k.a] + in.vertices[k.b] + fpt[eq[0]] + fpt[eq[1]]) / 4.0;
    }
    // vertex points: (Q + 2R + (n-3)P) / n
    std::vector<Vec3> qsum(nv, Vec3::Zero()), rsum(nv, Vec3::Zero());
    std::vector<int> val(nv, 0);
    for (int q = 0; q < nq; ++q)
        for (int v : in.quads[q]) qsum[v] += fpt[q];
    for (const auto& k : edge_list) {
        Vec3 mid = 0.5 * (in.vertices[k.a] + in.vertices[k.b]);
        rsum[k.a] += mid;
        rsum[k.b] += mid;
        val[k.a]++;
        val[k.b]++;
    }
    for (int v = 0; v < nv; ++v) {
        double n = val[v];
        out.vertices[v] = (qsum[v] / n + 2.0 * rsum[v] / n + (n - 3.0) * in.vertices[v]) / n;
    }
    // one child quad per (face, corner)
    for (int q = 0; q < nq; ++q) {
        const auto& Q = in.quads[q];
        for (int c = 0; c < 4; ++c) {
            int e_prev = edge_id[EdgeKey(Q[(c + 3) % 4], Q[c])];
            int e_next = edge_id[EdgeKey(Q[c], Q[(c + 1) % 4])];
            out.quads.push_back({Q[c], nv + e_next, nv + ne + q, nv + e_prev});
            if (!in.face_tags.empty()) out.face_tags.push_back(in.face_tags[q]);
        }
    }
    return out;
}

}  // namespace

QuadMesh catmull_clark(const QuadMesh& mesh, int levels) {
    QuadMesh m = mesh;
    for (int i = 0; i < levels; ++i) m = subdivide_once(m);
    return m;
}

std::pair<TriMesh, std::vector<int>> triangulate(const QuadMesh& mesh) {
    TriMesh tri;
    tri.vertices = mesh.vertices;
    std::vector<int> tags;
    for (int q = 0; q < mesh.num_quads(); ++q) {
        const auto& Q = mesh.quads[q];
        double d02 = (mesh.vertices[Q[0]] - mesh.vertices[Q[2]]).squaredNorm();
        double d13 = (mesh.vertices[Q[1]] - mesh.vertices[Q[3]]).squaredNorm();
        bool split02;
        if (d02 < d13) {
            split02 = true;
        } else if (d13 < d02) {
            split02 = false;
        } else {
            int mn = std::min({Q[0], Q[1], Q[2], Q[3]});
            split02 = (mn == Q[0] || mn == Q[2]);
        }
        if (split02) {
            tri.faces.push_back({Q[0], Q[1], Q[2]});
            tri.faces.push_back({Q[0], Q[2], Q[3]});
        } else {
            tri.faces.push_back({Q[0], Q[1], Q[3]});
            tri.faces.push_back({Q[1], Q[2], Q[3]});
        }
        int tag = mesh.face_tags.empty() ? -1 : mesh.face_tags[q];
        tags.push_back(tag);
        tags.push_back(tag);
    }
    return {tri, tags};
}

}  // namespace polyhex
