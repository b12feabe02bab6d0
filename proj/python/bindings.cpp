#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "mrsr/errors.hpp"
#include "mrsr/experiment.hpp"

namespace py = pybind11;
using namespace mrsr;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Frame to_frame(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D array");
  Frame f(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::memcpy(f.data(), a.data(), f.size() * sizeof(double));
  return f;
}

Array to_array(const Frame& f) {
  Array a({f.height(), f.width()});
  std::memcpy(a.mutable_data(), f.data(), f.size() * sizeof(double));
  return a;
}

py::list to_list(const std::vector<Frame>& frames) {
  py::list out;
  for (const Frame& f : frames) out.append(to_array(f));
  return out;
}

std::vector<Frame> to_frames(const std::vector<Array>& arrays) {
  std::vector<Frame> out;
  out.reserve(arrays.size());
  for (const Array& a : arrays) out.push_back(to_frame(a));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online video super-resolution with multirate inverse filterbanks";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<DimensionError>(m, "DimensionError", error);
  py::register_exception<DesignError>(m, "DesignError", error);
  py::register_exception<CacheStaleError>(m, "CacheStaleError", error);
  py::register_exception<IoError>(m, "IoError", error);
  py::register_exception<ParseError>(m, "ParseError", error);

  py::enum_<Method>(m, "Method")
      .value("BICUBIC", Method::Bicubic)
      .value("LTSR", Method::Ltsr)
      .value("MTSR", Method::Mtsr)
      .value("WMTSR", Method::Wmtsr);

  py::class_<SrrParams>(m, "SrrParams")
      .def_static("defaults_for", &SrrParams::defaults_for)
      .def_readwrite("d", &SrrParams::d)
      .def_readwrite("alpha", &SrrParams::alpha)
      .def_readwrite("alpha_t", &SrrParams::alphaT)
      .def_readwrite("lambda_tau", &SrrParams::lambda_tau)
      .def_readwrite("mu", &SrrParams::mu)
      .def_readwrite("baseline_iterations", &SrrParams::J_baseline)
      .def_readwrite("tap_radius", &SrrParams::tap_radius)
      .def("set", [](SrrParams& p, const std::string& key, const std::string& value) {
        apply_solver_setting(p, key, value);
      });

  py::class_<SrrEngine>(m, "Engine")
      .def(py::init([](Method method, std::optional<SrrParams> params) {
             return SrrEngine(method, params ? *params : SrrParams::defaults_for(method));
           }),
           py::arg("method"), py::arg("params") = py::none())
      .def("process", [](SrrEngine& e, const Array& y) { return to_array(e.process(to_frame(y))); })
      .def("process_with_shift",
           [](SrrEngine& e, const Array& y, double dx, double dy) {
             return to_array(e.process(to_frame(y), GlobalShift{dx, dy}));
           })
      .def_property_readonly("frame_index", [](const SrrEngine& e) { return e.state().frame_index; });

  m.def("synthetic", [](std::uint64_t seed, int frames, int window, bool outlier, double noise_variance) {
    RunConfig cfg;
    cfg.synthetic.frame_count = frames;
    cfg.synthetic.window = window;
    cfg.synthetic.procedural_size = std::max(cfg.synthetic.procedural_size, window + 64);
    cfg.synthetic.noise_variance = noise_variance;
    if (!outlier) cfg.synthetic.outlier.reset();
    const SyntheticSequence seq = generate_synthetic(cfg.synthetic_for(seed));
    py::list motion;
    for (const GlobalShift& s : seq.motion) motion.append(py::make_tuple(s.dx, s.dy));
    return py::make_tuple(to_list(seq.hr), to_list(seq.lr), motion);
  }, py::arg("seed") = 1, py::arg("frames") = 40, py::arg("window") = 256, py::arg("outlier") = true,
        py::arg("noise_variance") = 10.0);

  m.def("super_resolve", [](Method method, const std::vector<Array>& lr, std::optional<SrrParams> params) {
    SrrEngine engine(method, params ? *params : SrrParams::defaults_for(method));
    return to_list(super_resolve(engine, to_frames(lr)).estimates);
  }, py::arg("method"), py::arg("lr"), py::arg("params") = py::none());

  m.def("bicubic_upscale", [](const Array& lr, int d) { return to_array(bicubic_upscale(to_frame(lr), d)); },
        py::arg("lr"), py::arg("d") = 2);
  m.def("mse", [](const Array& a, const Array& b) { return mse(to_frame(a), to_frame(b)); });
  m.def("psnr", [](const Array& a, const Array& b) { return psnr(to_frame(a), to_frame(b)); });
  m.def("ssim", [](const Array& a, const Array& b) { return ssim(to_frame(a), to_frame(b)); });
  m.def("mse_db", &mse_db);
}
