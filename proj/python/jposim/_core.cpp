// Python bindings for the oscillator toolkit.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "jpo/calib.hpp"
#include "jpo/dynamics.hpp"
#include "jpo/fitting.hpp"
#include "jpo/potential.hpp"
#include "jpo/rng.hpp"
#include "jpo/spectra.hpp"
#include "jpo/trace_io.hpp"

namespace py = pybind11;
using namespace jpo;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bistable parametric-oscillator simulation and noise analysis";

    py::register_exception<InstabilityError>(m, "InstabilityError");
    py::register_exception<TraceFormatError>(m, "TraceFormatError");

    py::class_<ResonatorParams>(m, "ResonatorParams")
        .def(py::init<>())
        .def_readwrite("kappa_ext", &ResonatorParams::kappa_ext)
        .def_readwrite("kappa_int", &ResonatorParams::kappa_int)
        .def_readwrite("omega_s", &ResonatorParams::omega_s)
        .def_readwrite("gamma", &ResonatorParams::gamma)
        .def("kappa_tot", &ResonatorParams::kappa_tot)
        .def("validate", &ResonatorParams::validate);

    py::class_<DriveConfig>(m, "DriveConfig")
        .def(py::init<>())
        .def_readwrite("pump_ratio", &DriveConfig::pump_ratio)
        .def_readwrite("ils_amplitude", &DriveConfig::ils_amplitude)
        .def_readwrite("ils_phase", &DriveConfig::ils_phase)
        .def("validate", &DriveConfig::validate);

    py::class_<PhasePoint>(m, "PhasePoint")
        .def(py::init<>())
        .def(py::init([](double qx, double qy) {
                 return PhasePoint{qx, qy};
             }),
             py::arg("qx"), py::arg("qy"))
        .def_readwrite("qx", &PhasePoint::qx)
        .def_readwrite("qy", &PhasePoint::qy);

    py::enum_<StationaryKind>(m, "StationaryKind")
        .value("minimum", StationaryKind::minimum)
        .value("saddle", StationaryKind::saddle)
        .value("maximum", StationaryKind::maximum);

    py::class_<StationaryPoint>(m, "StationaryPoint")
        .def_readonly("location", &StationaryPoint::location)
        .def_readonly("energy", &StationaryPoint::energy)
        .def_readonly("kind", &StationaryPoint::kind)
        .def_readonly("hessian_eigenvalues",
                      &StationaryPoint::hessian_eigenvalues);

    py::class_<BarrierReport>(m, "BarrierReport")
        .def_readonly("barrier_from_each_well",
                      &BarrierReport::barrier_from_each_well)
        .def_readonly("well_energy_splitting",
                      &BarrierReport::well_energy_splitting);

    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("max_iterations", &SearchConfig::max_iterations)
        .def_readwrite("gradient_tolerance", &SearchConfig::gradient_tolerance);

    m.def("potential_value", &potential_value);
    m.def("potential_gradient", &potential_gradient);
    m.def("potential_hessian", &potential_hessian);
    m.def("well_location_no_ils", &well_location_no_ils);
    m.def("barrier_no_ils", &barrier_no_ils);
    m.def("find_stationary_points", &find_stationary_points,
          py::arg("params"), py::arg("drive"),
          py::arg("search") = SearchConfig{});
    m.def("barrier_and_asymmetry", &barrier_and_asymmetry, py::arg("params"),
          py::arg("drive"), py::arg("search") = SearchConfig{});
    m.def("cross_section", &cross_section);

    m.def("photon_number", &photon_number);
    m.def("ils_power_for_photon_number", &ils_power_for_photon_number);
    m.def("ils_amplitude_from_power", &ils_amplitude_from_power);
    m.def("ils_amplitude_for_photon_number", &ils_amplitude_for_photon_number);
    m.def("dbm_to_watts", &dbm_to_watts);
    m.def("watts_to_dbm", &watts_to_dbm);
    m.def("pump_ratio_from_powers", &pump_ratio_from_powers);
    m.attr("HBAR") = kHBar;

    py::enum_<StartToken>(m, "StartToken")
        .value("well0", StartToken::well0)
        .value("well1", StartToken::well1)
        .value("saddle", StartToken::saddle);

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimulationConfig::dt)
        .def_readwrite("duration", &SimulationConfig::duration)
        .def_readwrite("sample_rate", &SimulationConfig::sample_rate)
        .def_readwrite("noise_intensity", &SimulationConfig::noise_intensity)
        .def_readwrite("seed", &SimulationConfig::seed)
        .def_readwrite("initial_point", &SimulationConfig::initial_point)
        .def("validate", &SimulationConfig::validate);

    py::class_<QuadratureTrace>(m, "QuadratureTrace")
        .def(py::init<>())
        .def_readwrite("sample_rate", &QuadratureTrace::sample_rate)
        .def_readwrite("i_samples", &QuadratureTrace::i_samples)
        .def_readwrite("q_samples", &QuadratureTrace::q_samples)
        .def_readwrite("seed", &QuadratureTrace::seed)
        .def("__len__", &QuadratureTrace::size)
        .def("duration", &QuadratureTrace::duration);

    py::class_<LabelConfig>(m, "LabelConfig")
        .def(py::init<>())
        .def_readwrite("threshold_low", &LabelConfig::threshold_low)
        .def_readwrite("threshold_high", &LabelConfig::threshold_high)
        .def_readwrite("axis_x", &LabelConfig::axis_x)
        .def_readwrite("axis_y", &LabelConfig::axis_y);

    py::class_<SwitchingStats>(m, "SwitchingStats")
        .def_readonly("labels", &SwitchingStats::labels)
        .def_readonly("dwell_times", &SwitchingStats::dwell_times)
        .def_readonly("occupation", &SwitchingStats::occupation)
        .def_readonly("switch_count", &SwitchingStats::switch_count)
        .def_readonly("switching_rate", &SwitchingStats::switching_rate);

    py::class_<HistogramResult>(m, "HistogramResult")
        .def_readonly("bin_centers", &HistogramResult::bin_centers)
        .def_readonly("counts", &HistogramResult::counts)
        .def_readonly("bin_width", &HistogramResult::bin_width);

    py::enum_<HistogramAxis>(m, "HistogramAxis")
        .value("I", HistogramAxis::I)
        .value("Q", HistogramAxis::Q)
        .value("projection", HistogramAxis::projection);

    m.def("simulate_trace", &simulate_trace,
          py::call_guard<py::gil_scoped_release>());
    m.def("label_states", &label_states);
    m.def("histogram", &histogram);
    m.def("telegraph_reference", &telegraph_reference, py::arg("rate"),
          py::arg("amplitude"), py::arg("sample_rate"), py::arg("duration"),
          py::arg("seed"));

    py::class_<KramersScanEntry>(m, "KramersScanEntry")
        .def_readonly("ils_amplitude", &KramersScanEntry::ils_amplitude)
        .def_readonly("switching_rate", &KramersScanEntry::switching_rate)
        .def_readonly("switch_count", &KramersScanEntry::switch_count)
        .def_readonly("error", &KramersScanEntry::error);
    m.def("kramers_scan", &kramers_scan,
          py::call_guard<py::gil_scoped_release>());

    m.def("derive_seed", &derive_seed);

    py::enum_<WelchWindow>(m, "WelchWindow")
        .value("hann", WelchWindow::hann)
        .value("rectangular", WelchWindow::rectangular)
        .value("blackman", WelchWindow::blackman);
    py::enum_<WelchDetrend>(m, "WelchDetrend")
        .value("mean", WelchDetrend::mean)
        .value("none", WelchDetrend::none);

    py::class_<WelchConfig>(m, "WelchConfig")
        .def(py::init<>())
        .def_readwrite("segment_length", &WelchConfig::segment_length)
        .def_readwrite("overlap_fraction", &WelchConfig::overlap_fraction)
        .def_readwrite("window", &WelchConfig::window)
        .def_readwrite("detrend", &WelchConfig::detrend)
        .def("validate", &WelchConfig::validate);

    py::class_<CrossSpectrum>(m, "CrossSpectrum")
        .def_readonly("frequencies", &CrossSpectrum::frequencies)
        .def_readonly("values", &CrossSpectrum::values)
        .def_readonly("segment_count", &CrossSpectrum::segment_count)
        .def_readonly("low_average_warning",
                      &CrossSpectrum::low_average_warning);

    py::class_<NoiseSpectra>(m, "NoiseSpectra")
        .def_readonly("frequencies", &NoiseSpectra::frequencies)
        .def_readonly("s_ii", &NoiseSpectra::s_ii)
        .def_readonly("s_qq", &NoiseSpectra::s_qq)
        .def_readonly("s_iq", &NoiseSpectra::s_iq)
        .def_readonly("s_aa", &NoiseSpectra::s_aa)
        .def_readonly("s_bb", &NoiseSpectra::s_bb)
        .def_readonly("rotation_angle", &NoiseSpectra::rotation_angle)
        .def_readonly("mean_field", &NoiseSpectra::mean_field)
        .def_readonly("segment_count", &NoiseSpectra::segment_count)
        .def_readonly("low_average_warning",
                      &NoiseSpectra::low_average_warning);

    m.def("welch_csd", &welch_csd, py::call_guard<py::gil_scoped_release>());
    m.def("noise_covariance", &noise_covariance,
          py::call_guard<py::gil_scoped_release>());
    m.def("diagonalize", &diagonalize, py::arg("spectra"),
          py::arg("phase_axis_angle") = std::nullopt);

    py::class_<PhaseNoisePsd>(m, "PhaseNoisePsd")
        .def_readonly("frequencies", &PhaseNoisePsd::frequencies)
        .def_readonly("s_aa", &PhaseNoisePsd::s_aa);
    m.def("phase_noise_psd", &phase_noise_psd, py::arg("trace"),
          py::arg("config"), py::arg("phase_axis_angle") = std::nullopt);

    py::class_<FitMask>(m, "FitMask")
        .def(py::init<>())
        .def_readwrite("notches", &FitMask::notches);

    py::class_<LorentzianFit>(m, "LorentzianFit")
        .def_readonly("plateau", &LorentzianFit::plateau)
        .def_readonly("corner_hz", &LorentzianFit::corner_hz)
        .def_readonly("white_floor", &LorentzianFit::white_floor)
        .def_readonly("residual", &LorentzianFit::residual)
        .def_readonly("accepted", &LorentzianFit::accepted)
        .def_readonly("f_statistic", &LorentzianFit::f_statistic);

    py::class_<PowerLawFit>(m, "PowerLawFit")
        .def_readonly("exponent", &PowerLawFit::exponent)
        .def_readonly("amplitude", &PowerLawFit::amplitude)
        .def_readonly("band", &PowerLawFit::band)
        .def_readonly("residual", &PowerLawFit::residual);

    py::class_<RateConsistency>(m, "RateConsistency")
        .def_readonly("frequency_domain_rate",
                      &RateConsistency::frequency_domain_rate)
        .def_readonly("time_domain_rate", &RateConsistency::time_domain_rate)
        .def_readonly("relative_discrepancy",
                      &RateConsistency::relative_discrepancy)
        .def_readonly("pass_", &RateConsistency::pass)
        .def_readonly("asymmetric_flag", &RateConsistency::asymmetric_flag)
        .def_readonly("note", &RateConsistency::note);

    py::class_<FitOptions>(m, "FitOptions")
        .def(py::init<>())
        .def_readwrite("f_test_confidence", &FitOptions::f_test_confidence)
        .def_readwrite("restarts", &FitOptions::restarts)
        .def_readwrite("max_iterations", &FitOptions::max_iterations);

    m.def("fit_lorentzian", &fit_lorentzian, py::arg("freqs"), py::arg("psd"),
          py::arg("mask") = FitMask{}, py::arg("opts") = FitOptions{});
    m.def("fit_powerlaw", &fit_powerlaw);
    m.def("rate_consistency", &rate_consistency, py::arg("stats"),
          py::arg("fit"), py::arg("tolerance") = 0.2);

    m.def("write_trace_binary", &write_trace_binary);
    m.def("read_trace_binary", &read_trace_binary);
    m.def("write_trace_csv", &write_trace_csv);
    m.def("read_trace_csv", &read_trace_csv);
    m.def("read_trace_any", &read_trace_any);
}
