#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tubeinc/bounds.hpp"
#include "tubeinc/falconer.hpp"
#include "tubeinc/highlow.hpp"
#include "tubeinc/multiscale.hpp"
#include "tubeinc/richness.hpp"

namespace py = pybind11;
using namespace tubeinc;

namespace {

py::tuple vec_tuple(const Vec& v, int dim) {
    if (dim == 3) return py::make_tuple(v.x, v.y, v.z);
    return py::make_tuple(v.x, v.y);
}

}  // namespace

PYBIND11_MODULE(tubeinc, m) {
    m.doc() = "delta-tube incidence counting, heavy-ball dichotomy, and the "
              "Elekes-Sharir distance pipeline";

    py::class_<Tube>(m, "Tube")
        .def_property_readonly("anchor", [](const Tube& t) { return vec_tuple(t.anchor, t.dim); })
        .def_property_readonly("direction",
                               [](const Tube& t) { return vec_tuple(t.direction, t.dim); })
        .def_readonly("length", &Tube::length)
        .def_readonly("radius", &Tube::radius)
        .def_readonly("dim", &Tube::dim);

    py::class_<TubeFamily>(m, "TubeFamily")
        .def_readonly("delta", &TubeFamily::delta)
        .def_readonly("W", &TubeFamily::W)
        .def_readonly("dim", &TubeFamily::dim)
        .def("__len__", [](const TubeFamily& f) { return f.size(); })
        .def("tube", [](const TubeFamily& f, size_t i) { return f.tubes.at(i); })
        .def("to_json", &family_to_json)
        .def("spacing_report", [](const TubeFamily& f) {
            SpacingReport r = verify_spacing(f);
            py::dict d;
            d["ok"] = r.ok;
            d["worst_cell_load"] = r.worst_cell_load;
            d["pairwise_separation"] = r.pairwise_separation;
            return d;
        });

    py::class_<BallSet>(m, "BallSet")
        .def_readonly("delta", &BallSet::delta)
        .def_readonly("s", &BallSet::s)
        .def_readonly("w_effective", &BallSet::w_effective)
        .def("__len__", [](const BallSet& e) { return e.size(); })
        .def("center", [](const BallSet& e, size_t i) { return vec_tuple(e.centers.at(i), 2); })
        .def("to_json", &ballset_to_json);

    py::class_<RichMap>(m, "RichMap")
        .def_readonly("delta", &RichMap::delta)
        .def_readonly("dim", &RichMap::dim)
        .def("support_size", &RichMap::support_size)
        .def("total_incidences", &RichMap::total_incidences)
        .def("max_count", &RichMap::max_count)
        .def("rich_count", [](const RichMap& m_, uint64_t r) { return rich_count(m_, r); })
        .def("dyadic_profile", [](const RichMap& m_) { return dyadic_profile(m_); })
        .def("count_at",
             [](const RichMap& m_, int64_t k0, int64_t k1, int64_t k2) {
                 return m_.at({k0, k1, k2});
             },
             py::arg("k0"), py::arg("k1"), py::arg("k2") = 0)
        .def("__eq__", [](const RichMap& a, const RichMap& b) { return a == b; })
        .def("to_csv", &richmap_to_csv)
        .def("summary_json", &richmap_summary_json);

    m.def("gen_well_spaced", &gen_well_spaced, py::arg("delta"), py::arg("W"), py::arg("dim") = 2,
          py::arg("seed") = 0);
    m.def("gen_direction_spaced", &gen_direction_spaced, py::arg("delta"), py::arg("W"),
          py::arg("N1") = 1, py::arg("seed") = 0);
    m.def("gen_heavy_ball_example", &gen_heavy_ball_example, py::arg("delta"), py::arg("W"),
          py::arg("A"), py::arg("seed") = 0);
    m.def("gen_grid_example", &gen_grid_example, py::arg("delta"), py::arg("W"),
          py::arg("dim") = 2);
    m.def("gen_bush", &gen_bush, py::arg("delta"));
    m.def("gen_fat_rectangle", &gen_fat_rectangle, py::arg("delta"), py::arg("r"),
          py::arg("seed") = 0);
    m.def("gen_spread_ballset", &gen_spread_ballset, py::arg("delta"), py::arg("s"),
          py::arg("seed") = 0);

    m.def("richness_map_oracle", &richness_map_oracle);
    m.def("richness_map_fast", &richness_map_fast);

    m.def("bound_value",
          [](const std::string& name, double delta, double W, double tubes, int dim, double eps,
             double r) {
              auto b = bound_from_string(name);
              if (!b) throw std::invalid_argument("unknown bound " + name);
              BoundSpec spec;
              spec.name = *b;
              spec.delta = delta;
              spec.W = W;
              spec.tube_count = tubes;
              spec.dim = dim;
              spec.epsilon = eps;
              return bound_value(spec, r);
          },
          py::arg("name"), py::arg("delta"), py::arg("W"), py::arg("tube_count"), py::arg("dim"),
          py::arg("epsilon"), py::arg("r"));

    m.def("highlow_verdict",
          [](const TubeFamily& f, uint64_t E, double S) {
              RichMap map = richness_map_fast(f);
              RescaledInputs in = rescale_for_classify(f, map, uint32_t(E));
              HeavyBallVerdict v = classify(in.P, in.T, double(E), S, in.D, f.dim);
              py::dict d;
              d["kind"] = v.kind == VerdictKind::Thin ? "Thin" : "Thick";
              d["low"] = v.low_term;
              d["high"] = v.high_term;
              d["heavy_balls"] = v.heavy_balls.size();
              d["json"] = verdict_to_json(v);
              return d;
          },
          py::arg("family"), py::arg("E"), py::arg("S"));

    m.def("es_line", [](double x1, double x2, double y1, double y2) {
        ESLine l = es_line({x1, x2, 0}, {y1, y2, 0});
        return py::make_tuple(py::make_tuple(l.base.x, l.base.y, l.base.z),
                              py::make_tuple(l.dir.x, l.dir.y, l.dir.z));
    });
    m.def("invert_line", [](py::tuple base, py::tuple dir) {
        ESLine l;
        l.base = {base[0].cast<double>(), base[1].cast<double>(), base[2].cast<double>()};
        l.dir = {dir[0].cast<double>(), dir[1].cast<double>(), dir[2].cast<double>()};
        auto [x, y] = invert_line(l);
        return py::make_tuple(py::make_tuple(x.x, x.y), py::make_tuple(y.x, y.y));
    });

    m.def("falconer_pipeline",
          [](const BallSet& e, double delta, double eps) {
              FalconerReport r = falconer_pipeline(e, delta, eps);
              py::dict d;
              d["Q"] = r.Q;
              d["delta_intervals"] = r.delta_intervals;
              d["pair_count"] = r.pair_count;
              d["cs_slack"] = r.cs_slack;
              d["cs_exact_ok"] = r.cs_exact_ok;
              d["spacing_ok"] = r.spacing_ok;
              d["json"] = falconer_report_json(r);
              return d;
          },
          py::arg("ballset"), py::arg("delta"), py::arg("epsilon") = 0.2);

    m.def("grid_lower_bound_check", [](double delta, int W, int dim, uint64_t r) {
        GridLowerReport rep = grid_lower_bound_check(delta, W, dim, r);
        py::dict d;
        d["ok"] = rep.ok;
        d["min_richness"] = rep.min_richness;
        d["min_separation"] = rep.min_separation;
        d["rich_count"] = rep.rich_count;
        d["c_measured"] = rep.c_measured;
        return d;
    });
}
