// Command-line front end for the radar cube toolkit: simulate raw frames,
// run the range/velocity/angle chain, augment cubes, rasterize labels,
// score predictions, count network multiplies, and render views.
//
// Exit codes: 0 success, 2 usage or malformed input document, 3 value out
// of the radar's domain, 4 filesystem trouble.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcube/rcube.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rcube::io_error("cannot open '" + path + "' for reading");
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw rcube::schema_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

rcube::RadarConfig load_config(const std::string& path) {
    return rcube::config_from_json(load_json(path));
}

rcube::Scene load_scene(const std::string& path, const rcube::RadarConfig& cfg) {
    auto scene = rcube::scene_from_json(load_json(path));
    scene.validate(cfg);
    return scene;
}

template <class T>
rcube::Tensor<T> take_frame(const rcube::Tensor<T>& stack, std::size_t f) {
    std::vector<std::size_t> dims(stack.dims().begin() + 1, stack.dims().end());
    rcube::Tensor<T> out(dims);
    std::copy(stack.data() + f * out.size(), stack.data() + (f + 1) * out.size(), out.data());
    return out;
}

template <class T>
void store_frame(rcube::Tensor<T>& stack, std::size_t f, const rcube::Tensor<T>& frame) {
    std::copy(frame.data(), frame.data() + frame.size(), stack.data() + f * frame.size());
}

// Shared shape check for cube containers: [frames x range x velocity x angle].
void require_cube_stack(const rcube::RcubeData& data, const rcube::RadarConfig& cfg,
                        const std::string& path) {
    if (!data.is_complex()) throw rcube::schema_error("'" + path + "' does not hold complex cubes");
    const auto& t = data.complex_values;
    if (t.rank() != 4 || t.dim(1) != cfg.fft_range || t.dim(2) != cfg.fft_velocity ||
        t.dim(3) != cfg.fft_angle)
        throw rcube::domain_error("'" + path + "' cube dimensions do not match the config");
    if (t.dim(0) == 0) throw rcube::domain_error("'" + path + "' holds no frames");
}

struct SimulateArgs {
    std::string config, scene, out;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::size_t frames = 0;  // 0 = all scene frames
};

void run_simulate(const SimulateArgs& a) {
    const auto cfg = load_config(a.config);
    const auto scene = load_scene(a.scene, cfg);
    std::size_t d = scene.num_frames();
    if (a.frames > 0) {
        if (a.frames > d) throw rcube::domain_error("scene has fewer frames than requested");
        d = a.frames;
    }
    if (d == 0) throw rcube::domain_error("scene has no frames to simulate");

    const std::size_t ns = cfg.samples_per_chirp, nc = cfg.chirps_per_frame,
                      nq = cfg.num_rx_physical;
    rcube::Tensor<rcube::cplx> stack({d, ns, nc, nq});
    rcube::Rng rng(a.seed);
    rcube::ChirpPhaseState state;
    for (std::size_t f = 0; f < d; ++f) {
        auto raw = rcube::synthesize_frame(cfg, scene.frames[f], &state, a.noise,
                                           a.noise > 0 ? &rng : nullptr);
        state.advance(cfg, scene.frames[f]);
        store_frame(stack, f, raw.samples);
    }
    rcube::write_rcube(a.out, stack, "frame,sample,chirp,rx");
}

struct ProcessArgs {
    std::string config, in, out;
    bool no_compensate = false;
};

void run_process(const ProcessArgs& a) {
    const auto cfg = load_config(a.config);
    const auto data = rcube::read_rcube(a.in);
    if (!data.is_complex()) throw rcube::schema_error("'" + a.in + "' does not hold raw complex frames");
    const auto& raw_stack = data.complex_values;
    if (raw_stack.rank() != 4 || raw_stack.dim(1) != cfg.samples_per_chirp ||
        raw_stack.dim(2) != cfg.chirps_per_frame || raw_stack.dim(3) != cfg.num_rx_physical)
        throw rcube::domain_error("'" + a.in + "' frame dimensions do not match the config");

    const std::size_t d = raw_stack.dim(0);
    rcube::ProcessOptions opt;
    opt.compensate = !a.no_compensate;
    rcube::Tensor<rcube::cplx> cubes({d, cfg.fft_range, cfg.fft_velocity, cfg.fft_angle});
    for (std::size_t f = 0; f < d; ++f) {
        rcube::RawFrame frame;
        frame.samples = take_frame(raw_stack, f);
        frame.tx_schedule.resize(cfg.chirps_per_frame);
        for (std::size_t k = 0; k < cfg.chirps_per_frame; ++k)
            frame.tx_schedule[k] = cfg.tx_of_chirp(k);
        auto proc = rcube::process_frame(cfg, frame, opt);
        store_frame(cubes, f, proc.cube);
    }
    rcube::write_rcube(a.out, cubes, "frame,range,velocity,angle");
}

struct SliceArgs {
    std::string config, in, out_prefix;
    std::size_t chirp = 0;
};

void run_slice(const SliceArgs& a) {
    const auto cfg = load_config(a.config);
    const auto data = rcube::read_rcube(a.in);
    if (!data.is_complex()) throw rcube::schema_error("'" + a.in + "' does not hold raw complex frames");
    const auto& raw_stack = data.complex_values;
    if (raw_stack.rank() != 4 || raw_stack.dim(1) != cfg.samples_per_chirp ||
        raw_stack.dim(2) != cfg.chirps_per_frame || raw_stack.dim(3) != cfg.num_rx_physical)
        throw rcube::domain_error("'" + a.in + "' frame dimensions do not match the config");

    const std::size_t d = raw_stack.dim(0);
    rcube::Tensor<rcube::cplx> ra({d, cfg.fft_range, cfg.fft_angle});
    rcube::Tensor<double> rv({d, cfg.fft_range, cfg.fft_velocity});
    rcube::Tensor<double> va({d, cfg.fft_velocity, cfg.fft_angle});
    for (std::size_t f = 0; f < d; ++f) {
        rcube::RawFrame frame;
        frame.samples = take_frame(raw_stack, f);
        frame.tx_schedule.resize(cfg.chirps_per_frame);
        for (std::size_t k = 0; k < cfg.chirps_per_frame; ++k)
            frame.tx_schedule[k] = cfg.tx_of_chirp(k);
        auto views = rcube::slice_views(cfg, rcube::process_frame(cfg, frame), a.chirp);
        store_frame(ra, f, views.ra);
        store_frame(rv, f, views.rv);
        store_frame(va, f, views.va);
    }
    rcube::write_rcube(a.out_prefix + "_ra.rcube", ra, "frame,range,angle");
    rcube::write_rcube(a.out_prefix + "_rv.rcube", rv, "frame,range,velocity");
    rcube::write_rcube(a.out_prefix + "_va.rcube", va, "frame,velocity,angle");
}

struct AugmentArgs {
    std::string config, in, recipe, out;
    std::uint64_t seed = 0;
};

struct AugmentOp {
    enum class Kind { flip, translate_range, translate_angle, interpolate, mix };
    Kind kind = Kind::flip;
    double delta_r = 0;
    std::vector<double> target_ranges;
    double delta_theta = 0;
    std::vector<rcube::TargetRef> targets;
    rcube::GainProfile gain = rcube::GainProfile::uniform();
    rcube::Tensor<rcube::cplx> other;
};

double target_angle(const nlohmann::json& j) {
    if (j.contains("theta_deg")) return rcube::deg_to_rad(j.at("theta_deg").get<double>());
    if (j.contains("theta")) return j.at("theta").get<double>();
    throw rcube::schema_error("augmentation target missing 'theta' or 'theta_deg'");
}

std::vector<AugmentOp> parse_recipe(const nlohmann::json& j, const rcube::RadarConfig& cfg,
                                    const std::vector<std::size_t>& stack_dims) {
    if (!j.is_object() || !j.contains("ops") || !j.at("ops").is_array())
        throw rcube::schema_error("augmentation recipe needs an 'ops' array");
    std::vector<AugmentOp> ops;
    for (const auto& oj : j.at("ops")) {
        if (!oj.is_object() || !oj.contains("op") || !oj.at("op").is_string())
            throw rcube::schema_error("each recipe entry needs an 'op' name");
        const std::string name = oj.at("op").get<std::string>();
        AugmentOp op;
        if (name == "flip") {
            op.kind = AugmentOp::Kind::flip;
        } else if (name == "translate_range") {
            op.kind = AugmentOp::Kind::translate_range;
            if (!oj.contains("delta_r") || !oj.at("delta_r").is_number())
                throw rcube::schema_error("translate_range needs numeric 'delta_r'");
            op.delta_r = oj.at("delta_r").get<double>();
            if (!oj.contains("target_ranges") || !oj.at("target_ranges").is_array())
                throw rcube::schema_error("translate_range needs a 'target_ranges' array");
            for (const auto& r : oj.at("target_ranges")) op.target_ranges.push_back(r.get<double>());
        } else if (name == "translate_angle") {
            op.kind = AugmentOp::Kind::translate_angle;
            if (oj.contains("delta_theta_deg"))
                op.delta_theta = rcube::deg_to_rad(oj.at("delta_theta_deg").get<double>());
            else if (oj.contains("delta_theta"))
                op.delta_theta = oj.at("delta_theta").get<double>();
            else
                throw rcube::schema_error("translate_angle needs 'delta_theta' or 'delta_theta_deg'");
            if (!oj.contains("targets") || !oj.at("targets").is_array())
                throw rcube::schema_error("translate_angle needs a 'targets' array");
            for (const auto& tj : oj.at("targets")) {
                rcube::TargetRef ref;
                if (!tj.contains("r") || !tj.at("r").is_number())
                    throw rcube::schema_error("augmentation target missing numeric 'r'");
                ref.range = tj.at("r").get<double>();
                ref.azimuth = target_angle(tj);
                op.targets.push_back(ref);
            }
            const std::string gain = oj.value("gain", "uniform");
            if (gain == "uniform")
                op.gain = rcube::GainProfile::uniform();
            else if (gain == "cosine_squared")
                op.gain = rcube::GainProfile::cosine_squared();
            else
                throw rcube::schema_error("unknown gain profile '" + gain + "'");
        } else if (name == "interpolate") {
            op.kind = AugmentOp::Kind::interpolate;
        } else if (name == "mix") {
            op.kind = AugmentOp::Kind::mix;
            if (!oj.contains("other") || !oj.at("other").is_string())
                throw rcube::schema_error("mix needs an 'other' container path");
            const std::string path = oj.at("other").get<std::string>();
            auto other = rcube::read_rcube(path);
            require_cube_stack(other, cfg, path);
            if (other.complex_values.dims() != stack_dims)
                throw rcube::domain_error("'" + path + "' shape does not match the input cubes");
            op.other = std::move(other.complex_values);
        } else {
            throw rcube::schema_error("unknown augmentation op '" + name + "'");
        }
        ops.push_back(std::move(op));
    }
    return ops;
}

void run_augment(const AugmentArgs& a) {
    const auto cfg = load_config(a.config);
    const auto data = rcube::read_rcube(a.in);
    require_cube_stack(data, cfg, a.in);
    const auto& stack = data.complex_values;
    const auto ops = parse_recipe(load_json(a.recipe), cfg, stack.dims());

    rcube::Rng rng(a.seed);
    rcube::Tensor<rcube::cplx> out(stack.dims());
    for (std::size_t f = 0; f < stack.dim(0); ++f) {
        auto cube = take_frame(stack, f);
        auto blanks = rcube::no_blanks(cube);
        for (const auto& op : ops) {
            switch (op.kind) {
                case AugmentOp::Kind::flip:
                    cube = rcube::flip_horizontal(cube);
                    blanks = rcube::flip_angle_axis(blanks, 2);
                    break;
                case AugmentOp::Kind::translate_range: {
                    auto res = rcube::translate_range(cfg, cube, blanks, op.delta_r, op.target_ranges);
                    cube = std::move(res.cube);
                    blanks = std::move(res.blanks);
                    break;
                }
                case AugmentOp::Kind::translate_angle: {
                    auto res = rcube::translate_angle(cfg, cube, blanks, op.delta_theta, op.targets,
                                                      op.gain);
                    cube = std::move(res.cube);
                    blanks = std::move(res.blanks);
                    break;
                }
                case AugmentOp::Kind::interpolate: {
                    auto res = rcube::interpolate_blanks(cube, blanks, rng);
                    cube = std::move(res.cube);
                    blanks = std::move(res.blanks);
                    break;
                }
                case AugmentOp::Kind::mix:
                    cube = rcube::mix(cube, take_frame(op.other, f));
                    break;
            }
        }
        store_frame(out, f, cube);
    }
    rcube::write_rcube(a.out, out, "augmented:" + data.header.axes);
}

struct LabelArgs {
    std::string config, scene, out;
    std::size_t frames = 0;
};

void run_label(const LabelArgs& a) {
    const auto cfg = load_config(a.config);
    const auto scene = load_scene(a.scene, cfg);
    std::size_t d = scene.num_frames();
    if (a.frames > 0) {
        if (a.frames > d) throw rcube::domain_error("scene has fewer frames than requested");
        d = a.frames;
    }
    if (d == 0) throw rcube::domain_error("scene has no frames to label");

    std::vector<rcube::GtCenter> centers;
    for (std::size_t f = 0; f < d; ++f)
        for (const auto& t : scene.frames[f]) {
            rcube::GtCenter c;
            c.frame = f;
            c.range_bin = static_cast<std::size_t>(cfg.range_bin_of(t.range));
            c.angle_bin = cfg.angle_bin_centered(t.azimuth);
            c.cls = t.cls;
            centers.push_back(c);
        }
    auto y = rcube::rasterize_labels(centers, d, cfg.fft_range, cfg.fft_angle);
    rcube::write_rcube(a.out, y, "frame,range,angle,class");
}

struct LossArgs {
    std::string pred, truth, pred_location;
    double gamma = 0.5;
    long long n_obj = 1;
};

rcube::Tensor<double> load_heat(const std::string& path) {
    auto data = rcube::read_rcube(path);
    if (data.is_complex())
        throw rcube::schema_error("'" + path + "' holds complex data, expected a confidence map");
    return std::move(data.real_values);
}

void run_loss(const LossArgs& a) {
    const auto pred = load_heat(a.pred);
    const auto truth = load_heat(a.truth);
    rcube::LossParams params;
    params.gamma = a.gamma;
    params.n_obj = a.n_obj;
    double value = 0;
    if (a.pred_location.empty()) {
        value = rcube::focal_loss(pred, truth, params);
    } else {
        value = rcube::combined_loss(pred, load_heat(a.pred_location), truth, params);
    }
    std::cout << std::setprecision(17) << value << "\n";
}

struct EvalArgs {
    std::string config, pred, scene;
    double threshold = rcube::kDetectionThreshold;
    bool csv = false;
};

void run_eval(const EvalArgs& a) {
    const auto cfg = load_config(a.config);
    const auto pred = load_heat(a.pred);
    if (pred.rank() != 4 || pred.dim(3) != rcube::kNumClasses)
        throw rcube::domain_error("'" + a.pred + "' is not a [frames x range x angle x class] map");
    const auto scene = load_scene(a.scene, cfg);
    const std::size_t d = pred.dim(0);
    if (scene.num_frames() > d)
        throw rcube::domain_error("prediction map covers fewer frames than the scene");

    std::vector<rcube::GtCenter> centers;
    for (std::size_t f = 0; f < scene.num_frames(); ++f)
        for (const auto& t : scene.frames[f]) {
            rcube::GtCenter c;
            c.frame = f;
            c.range_bin = static_cast<std::size_t>(cfg.range_bin_of(t.range));
            c.angle_bin = cfg.angle_bin_centered(t.azimuth);
            c.cls = t.cls;
            centers.push_back(c);
        }
    const auto dets = rcube::extract_detections(pred, a.threshold);

    // One scoring scene per frame.
    std::vector<rcube::MatchResult> scenes;
    for (std::size_t f = 0; f < d; ++f) {
        std::vector<rcube::Detection> fd;
        for (const auto& det : dets)
            if (det.frame == f) fd.push_back(det);
        std::vector<rcube::GtCenter> fc;
        for (const auto& c : centers)
            if (c.frame == f) fc.push_back(c);
        scenes.push_back(rcube::match_detections(fd, fc));
    }
    if (a.csv)
        std::cout << rcube::metrics_to_csv(scenes);
    else
        std::cout << rcube::metrics_to_json(scenes).dump(2) << "\n";
}

struct FlopsArgs {
    std::vector<std::string> models;
};

void run_flops(const FlopsArgs& a) {
    std::vector<rcube::ModelSpec> models;
    for (const auto& path : a.models) models.push_back(rcube::model_from_json(load_json(path)));
    if (models.size() == 1) {
        std::cout << rcube::flops(models[0]) << "\n";
        return;
    }
    std::cout << "name,flops,params,feature_cells\n";
    for (const auto& row : rcube::compare(models))
        std::cout << row.name << ',' << row.flops << ',' << row.space.params << ','
                  << row.space.feature_cells << "\n";
}

struct RenderArgs {
    std::string in, out;
    std::size_t frame = 0;
    std::string colormap = "viridis";
    double db_floor = -60.0;
};

void run_render(const RenderArgs& a) {
    const auto data = rcube::read_rcube(a.in);
    rcube::Tensor<double> mag;
    if (data.is_complex()) {
        const auto& t = data.complex_values;
        if (t.rank() == 2) {
            mag = rcube::Tensor<double>(t.dims());
            for (std::size_t i = 0; i < t.size(); ++i) mag[i] = std::abs(t[i]);
        } else if (t.rank() == 3) {
            if (a.frame >= t.dim(0)) throw rcube::domain_error("frame index outside the container");
            auto slice = take_frame(t, a.frame);
            mag = rcube::Tensor<double>(slice.dims());
            for (std::size_t i = 0; i < slice.size(); ++i) mag[i] = std::abs(slice[i]);
        } else {
            throw rcube::domain_error("render expects a 2-D view or a stack of them");
        }
    } else {
        const auto& t = data.real_values;
        if (t.rank() == 2) {
            mag = t;
        } else if (t.rank() == 3) {
            if (a.frame >= t.dim(0)) throw rcube::domain_error("frame index outside the container");
            mag = take_frame(t, a.frame);
        } else {
            throw rcube::domain_error("render expects a 2-D view or a stack of them");
        }
    }
    rcube::RenderSpec spec;
    spec.colormap = a.colormap;
    spec.db_floor = a.db_floor;
    rcube::write_ppm(a.out, mag, spec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMCW radar cube toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Synthesize raw de-chirped frames from a scene");
    c_sim->add_option("--config", sim.config, "Radar config JSON")->required();
    c_sim->add_option("--scene", sim.scene, "Scene JSON")->required();
    c_sim->add_option("--out", sim.out, "Output container path")->required();
    c_sim->add_option("--noise", sim.noise, "Complex noise sigma");
    c_sim->add_option("--seed", sim.seed, "Noise seed");
    c_sim->add_option("--frames", sim.frames, "Simulate only the first N frames");
    c_sim->callback([&] { run_simulate(sim); });

    ProcessArgs proc;
    auto* c_proc = app.add_subcommand("process", "Raw frames to range-velocity-angle cubes");
    c_proc->add_option("--config", proc.config, "Radar config JSON")->required();
    c_proc->add_option("--in", proc.in, "Raw frames container")->required();
    c_proc->add_option("--out", proc.out, "Output cube container")->required();
    c_proc->add_flag("--no-compensate", proc.no_compensate, "Skip the inter-Tx phase correction");
    c_proc->callback([&] { run_process(proc); });

    SliceArgs slice;
    auto* c_slice = app.add_subcommand("slice", "Raw frames to 2-D view containers");
    c_slice->add_option("--config", slice.config, "Radar config JSON")->required();
    c_slice->add_option("--in", slice.in, "Raw frames container")->required();
    c_slice->add_option("--out-prefix", slice.out_prefix, "Prefix for _ra/_rv/_va outputs")->required();
    c_slice->add_option("--chirp", slice.chirp, "TDM cycle used for the range-angle view");
    c_slice->callback([&] { run_slice(slice); });

    AugmentArgs aug;
    auto* c_aug = app.add_subcommand("augment", "Apply a recipe of cube transforms");
    c_aug->add_option("--config", aug.config, "Radar config JSON")->required();
    c_aug->add_option("--in", aug.in, "Input cube container")->required();
    c_aug->add_option("--recipe", aug.recipe, "Recipe JSON")->required();
    c_aug->add_option("--out", aug.out, "Output cube container")->required();
    c_aug->add_option("--seed", aug.seed, "Seed for blank interpolation");
    c_aug->callback([&] { run_augment(aug); });

    LabelArgs label;
    auto* c_label = app.add_subcommand("label", "Rasterize scene ground truth to confidence maps");
    c_label->add_option("--config", label.config, "Radar config JSON")->required();
    c_label->add_option("--scene", label.scene, "Scene JSON")->required();
    c_label->add_option("--out", label.out, "Output label container")->required();
    c_label->add_option("--frames", label.frames, "Label only the first N frames");
    c_label->callback([&] { run_label(label); });

    LossArgs loss;
    auto* c_loss = app.add_subcommand("loss", "Score a prediction map against labels");
    c_loss->add_option("--pred", loss.pred, "Prediction container")->required();
    c_loss->add_option("--truth", loss.truth, "Label container")->required();
    c_loss->add_option("--pred-location", loss.pred_location,
                       "Second, location-only prediction for the combined objective");
    c_loss->add_option("--gamma", loss.gamma, "Weight of the location-only term");
    c_loss->add_option("--n-obj", loss.n_obj, "Object count normalizer");
    c_loss->callback([&] { run_loss(loss); });

    EvalArgs eval;
    auto* c_eval = app.add_subcommand("eval", "Detection metrics for a prediction map");
    c_eval->add_option("--config", eval.config, "Radar config JSON")->required();
    c_eval->add_option("--pred", eval.pred, "Prediction container")->required();
    c_eval->add_option("--scene", eval.scene, "Ground-truth scene JSON")->required();
    c_eval->add_option("--threshold", eval.threshold, "Detection confidence threshold");
    c_eval->add_flag("--csv", eval.csv, "Emit CSV instead of JSON");
    c_eval->callback([&] { run_eval(eval); });

    FlopsArgs flops;
    auto* c_flops = app.add_subcommand("flops", "Multiply counts for conv model documents");
    c_flops->add_option("models", flops.models, "Model JSON files")->required()->expected(-1);
    c_flops->callback([&] { run_flops(flops); });

    RenderArgs render;
    auto* c_render = app.add_subcommand("render", "Render a magnitude view to a PPM image");
    c_render->add_option("--in", render.in, "View container")->required();
    c_render->add_option("--out", render.out, "Output PPM path")->required();
    c_render->add_option("--frame", render.frame, "Frame index for stacked views");
    c_render->add_option("--colormap", render.colormap, "viridis or gray");
    c_render->add_option("--db-floor", render.db_floor, "Bottom of the dB scale");
    c_render->callback([&] { run_render(render); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const rcube::schema_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const rcube::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const rcube::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
