#include "polyhex/polycube.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace polyhex {

namespace {

// (u,v) axes so that e_u x e_v equals the outward normal
std::pair<int, int> tangent_axes(const AxisDir& d) {
    static const int tab[3][2][2] = {{{1, 2}, {2, 1}},   // +X, -X
                                     {{2, 0}, {0, 2}},   // +Y, -Y
                                     {{0, 1}, {1, 0}}};  // +Z, -Z
    const auto& t = tab[d.axis][d.sign > 0 ? 0 : 1];
    return {t[0], t[1]};
}

int dir_index(const AxisDir& d) { return d.axis * 2 + (d.sign > 0 ? 0 : 1); }

using LatEdge = std::pair<IVec3, IVec3>;  // sorted endpoints

LatEdge make_edge(const IVec3& a, const IVec3& b) {
    return IVec3Less{}(a, b) ? LatEdge{a, b} : LatEdge{b, a};
}

struct LatEdgeLess {
    bool operator()(const LatEdge& x, const LatEdge& y) const {
        IVec3Less lt;
        if (lt(x.first, y.first)) return true;
        if (lt(y.first, x.first)) return false;
        return lt(x.second, y.second);
    }
};

}  // namespace

std::array<IVec3, 4> LatticeFacet::corner_points() const {
    auto [u, v] = tangent_axes(dir);
    IVec3 b = cell;
    b[dir.axis] = plane();
    IVec3 eu = IVec3::Zero(), ev = IVec3::Zero();
    eu[u] = 1;
    ev[v] = 1;
    return {b, b + eu, b + eu + ev, b + ev};
}

std::array<IVec3, 4> InternalFacet::corner_points() const {
    int u = (axis + 1) % 3, v = (axis + 2) % 3;
    IVec3 b = lower_cell;
    b[axis] = lower_cell[axis] + 1;
    IVec3 eu = IVec3::Zero(), ev = IVec3::Zero();
    eu[u] = 1;
    ev[v] = 1;
    return {b, b + eu, b + eu + ev, b + ev};
}

Vec3 PolycubeFace::lattice_centroid() const {
    Vec3 c = Vec3::Zero();
    for (const auto& f : facets) {
        Vec3 fc = Vec3::Zero();
        for (const auto& p : f.corner_points()) fc += p.cast<double>();
        c += fc / 4.0;
    }
    return c / static_cast<double>(facets.size());
}

int PolycubeStructure::boundary_facet_count() const {
    int n = 0;
    for (const auto& f : faces) n += static_cast<int>(f.facets.size());
    return n;
}

int PolycubeStructure::corner_index(const IVec3& p) const {
    for (size_t i = 0; i < corners.size(); ++i)
        if (corners[i] == p) return static_cast<int>(i);
    return -1;
}

int PolycubeStructure::genus() const {
    std::set<IVec3, IVec3Less> pts;
    std::set<LatEdge, LatEdgeLess> edg;
    int nf = 0;
    for (const auto& face : faces)
        for (const auto& f : face.facets) {
            auto cp = f.corner_points();
            for (int i = 0; i < 4; ++i) {
                pts.insert(cp[i]);
                edg.insert(make_edge(cp[i], cp[(i + 1) % 4]));
            }
            ++nf;
        }
    int chi = static_cast<int>(pts.size()) - static_cast<int>(edg.size()) + nf;
    return (2 - chi) / 2;
}

void PolycubeStructure::build() {
    faces.clear();
    internal_faces.clear();
    corners.clear();
    edges.clear();
    cube_set.clear();
    for (const auto& c : cubes) cube_set.insert(c);
    if (cubes.empty()) throw MeshError("empty polycube");

    // face-connectivity of the cube union
    {
        std::set<IVec3, IVec3Less> seen;
        std::deque<IVec3> q{cubes[0]};
        seen.insert(cubes[0]);
        while (!q.empty()) {
            IVec3 c = q.front();
            q.pop_front();
            for (int a = 0; a < 3; ++a)
                for (int s : {-1, 1}) {
                    IVec3 n = c;
                    n[a] += s;
                    if (cube_set.count(n) && !seen.count(n)) {
                        seen.insert(n);
                        q.push_back(n);
                    }
                }
        }
        if (seen.size() != cube_set.size()) throw MeshError("polycube is not face-connected");
    }

    // boundary facets
    std::vector<LatticeFacet> bfacets;
    for (const auto& c : cubes)
        for (int a = 0; a < 3; ++a)
            for (int s : {-1, 1}) {
                IVec3 n = c;
                n[a] += s;
                if (!cube_set.count(n)) bfacets.push_back({c, {a, s}});
            }

    // group into maximal connected same-label planar faces
    {
        const int nf = static_cast<int>(bfacets.size());
        std::map<LatEdge, std::vector<int>, LatEdgeLess> edge_to_facets;
        for (int i = 0; i < nf; ++i) {
            auto cp = bfacets[i].corner_points();
            for (int e = 0; e < 4; ++e)
                edge_to_facets[make_edge(cp[e], cp[(e + 1) % 4])].push_back(i);
        }
        std::vector<int> comp(nf, -1);
        int ncomp = 0;
        for (int i = 0; i < nf; ++i) {
            if (comp[i] >= 0) continue;
            comp[i] = ncomp;
            std::deque<int> q{i};
            while (!q.empty()) {
                int f = q.front();
                q.pop_front();
                auto cp = bfacets[f].corner_points();
                for (int e = 0; e < 4; ++e)
                    for (int g : edge_to_facets[make_edge(cp[e], cp[(e + 1) % 4])]) {
                        if (comp[g] >= 0) continue;
                        if (dir_index(bfacets[g].dir) != dir_index(bfacets[f].dir)) continue;
                        if (bfacets[g].plane() != bfacets[f].plane()) continue;
                        comp[g] = ncomp;
                        q.push_back(g);
                    }
            }
            ++ncomp;
        }
        std::vector<PolycubeFace> fs(ncomp);
        for (int i = 0; i < nf; ++i) {
            auto& face = fs[comp[i]];
            face.label = bfacets[i].dir;
            face.plane = bfacets[i].plane();
            face.facets.push_back(bfacets[i]);
        }
        auto min_cell = [](const PolycubeFace& f) {
            IVec3 m = f.facets[0].cell;
            for (const auto& ft : f.facets)
                if (IVec3Less{}(ft.cell, m)) m = ft.cell;
            return m;
        };
        std::sort(fs.begin(), fs.end(), [&](const PolycubeFace& a, const PolycubeFace& b) {
            int da = dir_index(a.label), db = dir_index(b.label);
            if (da != db) return da < db;
            if (a.plane != b.plane) return a.plane < b.plane;
            return IVec3Less{}(min_cell(a), min_cell(b));
        });
        for (int i = 0; i < ncomp; ++i) fs[i].id = i;
        faces = std::move(fs);
    }

    // boundary lattice edges -> incident face ids
    std::map<LatEdge, std::vector<int>, LatEdgeLess> bedge_faces;
    for (const auto& face : faces)
        for (const auto& f : face.facets) {
            auto cp = f.corner_points();
            for (int e = 0; e < 4; ++e)
                bedge_faces[make_edge(cp[e], cp[(e + 1) % 4])].push_back(face.id);
        }
    for (const auto& [e, ids] : bedge_faces)
        if (ids.size() != 2) throw MeshError("non-manifold polycube boundary edge");

    // internal facets; each of their lattice edges must lie on the boundary
    for (const auto& c : cubes)
        for (int a = 0; a < 3; ++a) {
            IVec3 n = c;
            n[a] += 1;
            if (!cube_set.count(n)) continue;
            InternalFacet f{c, a};
            auto cp = f.corner_points();
            for (int e = 0; e < 4; ++e)
                if (!bedge_faces.count(make_edge(cp[e], cp[(e + 1) % 4])))
                    throw MeshError("internal facet edge not on boundary (template not thickness-1)");
            internal_faces.push_back(f);
        }

    // corners: lattice points touching >= 3 distinct labels
    {
        std::map<IVec3, std::set<int>, IVec3Less> point_labels;
        for (const auto& face : faces)
            for (const auto& f : face.facets)
                for (const auto& p : f.corner_points())
                    point_labels[p].insert(dir_index(face.label));
        for (const auto& [p, labels] : point_labels)
            if (labels.size() >= 3) corners.push_back(p);
    }

    // crease edges (two distinct incident faces) walked corner-to-corner
    {
        std::map<IVec3, std::vector<LatEdge>, IVec3Less> point_creases;
        std::set<LatEdge, LatEdgeLess> creases;
        for (const auto& [e, ids] : bedge_faces)
            if (ids[0] != ids[1]) {
                creases.insert(e);
                point_creases[e.first].push_back(e);
                point_creases[e.second].push_back(e);
            }
        std::set<LatEdge, LatEdgeLess> used;
        std::set<IVec3, IVec3Less> corner_set(corners.begin(), corners.end());
        for (const auto& start : corners) {
            for (const auto& e0 : point_creases[start]) {
                if (used.count(e0)) continue;
                PolycubeEdge pe;
                pe.corner_a = corner_index(start);
                pe.points.push_back(start);
                LatEdge cur = e0;
                IVec3 prev = start;
                while (true) {
                    used.insert(cur);
                    IVec3 next = (cur.first == prev) ? cur.second : cur.first;
                    pe.points.push_back(next);
                    auto fit = bedge_faces.find(cur);
                    if (pe.face_ids[0] == -1) {
                        pe.face_ids = {fit->second[0], fit->second[1]};
                    } else if (!((pe.face_ids[0] == fit->second[0] && pe.face_ids[1] == fit->second[1]) ||
                                 (pe.face_ids[0] == fit->second[1] && pe.face_ids[1] == fit->second[0]))) {
                        throw MeshError("crease face pair changes off-corner");
                    }
                    if (corner_set.count(next)) {
                        pe.corner_b = corner_index(next);
                        break;
                    }
                    bool found = false;
                    for (const auto& e : point_creases[next])
                        if (!(e == cur) && !used.count(e)) {
                            cur = e;
                            prev = next;
                            found = true;
                            break;
                        }
                    if (!found) throw MeshError("crease curve does not terminate at a corner");
                }
                // polycube edges are straight lattice segments
                IVec3 d = pe.points.back() - pe.points.front();
                for (size_t i = 1; i < pe.points.size(); ++i) {
                    IVec3 step = pe.points[i] - pe.points[i - 1];
                    if (step.dot(d) <= 0 || step.cross(d).squaredNorm() != 0)
                        throw MeshError("crease curve is not straight");
                }
                edges.push_back(std::move(pe));
            }
        }
        if (used.size() != creases.size()) throw MeshError("unreached crease edges");
        std::sort(edges.begin(), edges.end(), [](const PolycubeEdge& a, const PolycubeEdge& b) {
            int aa = std::min(a.corner_a, a.corner_b), ab = std::max(a.corner_a, a.corner_b);
            int ba = std::min(b.corner_a, b.corner_b), bb = std::max(b.corner_a, b.corner_b);
            return aa < ba || (aa == ba && ab < bb);
        });
    }
}

std::vector<std::vector<int>> coplanar_label_groups(const PolycubeStructure& pc) {
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (const auto& f : pc.faces) groups[{dir_index(f.label), f.plane}].push_back(f.id);
    std::vector<std::vector<int>> out;
    for (const auto& [k, ids] : groups)
        if (ids.size() > 1) out.push_back(ids);
    return out;
}

std::vector<IVec3> corner_points(const PolycubeStructure& pc) { return pc.corners; }

PolycubeStructure polycube_template(int type_id) {
    auto cells = [](std::initializer_list<std::array<int, 3>> l) {
        std::vector<IVec3> v;
        for (const auto& c : l) v.emplace_back(c[0], c[1], c[2]);
        return v;
    };
    PolycubeStructure pc;
    pc.type_id = type_id;
    switch (type_id) {
        case 1:  // single cube
            pc.cubes = cells({{0, 0, 0}});
            break;
        case 2:  // genus-one ring, hole along z
            pc.cubes = cells({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 1, 0},
                              {2, 2, 0}, {1, 2, 0}, {0, 2, 0}, {0, 1, 0}});
            break;
        case 3:  // two stacked cubes (rod)
            pc.cubes = cells({{0, 0, 0}, {0, 0, 1}});
            break;
        case 4:  // tall rod
            pc.cubes = cells({{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}});
            break;
        case 5:  // short bar along x
            pc.cubes = cells({{0, 0, 0}, {1, 0, 0}});
            break;
        case 6:  // long bar along x
            pc.cubes = cells({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
            break;
        case 7:  // L assembly
            pc.cubes = cells({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}});
            break;
        case 8:  // T assembly
            pc.cubes = cells({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {1, 1, 0}});
            break;
        case 9:  // cube atop ring
            pc.cubes = cells({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 1, 0},
                              {2, 2, 0}, {1, 2, 0}, {0, 2, 0}, {0, 1, 0},
                              {0, 0, 1}});
            break;
        case 10:  // ring with hole along x
            pc.cubes = cells({{0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {0, 2, 1},
                              {0, 2, 2}, {0, 1, 2}, {0, 0, 2}, {0, 0, 1}});
            break;
        case 11:  // U assembly: bar with two towers (two coplanar top faces)
            pc.cubes = cells({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 0, 1}, {2, 0, 1}});
            break;
        default:
            throw MeshError("polycube template type " + std::to_string(type_id) +
                            " out of range (1..11)");
    }
    pc.build();
    return pc;
}

std::string serialize_template(const PolycubeStructure& pc) {
    std::ostringstream out;
    for (const auto& c : pc.cubes) out << c.x() << ' ' << c.y() << ' ' << c.z() << '\n';
    return out.str();
}

PolycubeStructure parse_template(const std::string& text, int type_id) {
    PolycubeStructure pc;
    pc.type_id = type_id;
    std::istringstream in(text);
    int i, j, k;
    while (in >> i >> j >> k) pc.cubes.emplace_back(i, j, k);
    pc.build();
    return pc;
}

}  // namespace polyhex
