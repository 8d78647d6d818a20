#include "uwr/rectify.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace uwr::rectify {
namespace {

using nlohmann::json;

json matrix_json(const Eigen::Matrix3d& m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
    return a;
}

Eigen::Matrix3d matrix_from(const json& a, const char* key) {
    if (!a.is_array() || a.size() != 9)
        throw RectifyError(std::string("rectification model: '") + key + "' must hold 9 numbers");
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = a.at(std::size_t(3 * r + c)).get<double>();
    return m;
}

}  // namespace

std::string model_to_json(const RectificationModel& m) {
    const auto& p = m.params;
    json j;
    j["width"] = m.width;
    j["height"] = m.height;
    j["H_left"] = matrix_json(m.H_left);
    j["H_right"] = matrix_json(m.H_right);
    j["angles"] = {p.left_y, p.left_z, p.right_x, p.right_y, p.right_z};
    j["alpha_prime"] = p.alpha_prime;
    j["residual_rms"] = m.residual_rms;
    j["K_old"] = matrix_json(m.K_old);
    j["K_new_left"] = matrix_json(m.K_new_left);
    j["K_new_right"] = matrix_json(m.K_new_right);
    j["iterations"] = m.iterations;
    j["restarts"] = m.restarts;
    j["alpha_fixed"] = m.alpha_fixed;
    return j.dump(2);
}

RectificationModel model_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RectificationModel m;
        m.width = j.at("width").get<int>();
        m.height = j.at("height").get<int>();
        m.H_left = matrix_from(j.at("H_left"), "H_left");
        m.H_right = matrix_from(j.at("H_right"), "H_right");
        const auto& a = j.at("angles");
        if (!a.is_array() || a.size() != 5) throw RectifyError("rectification model: 'angles' must hold 5 numbers");
        m.params = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>(),
                    a[3].get<double>(), a[4].get<double>(), j.at("alpha_prime").get<double>()};
        m.residual_rms = j.at("residual_rms").get<double>();
        m.K_old = j.contains("K_old") ? matrix_from(j["K_old"], "K_old")
                                      : guessed_intrinsics(m.params.alpha_prime, m.width, m.height);
        m.K_new_left = j.contains("K_new_left") ? matrix_from(j["K_new_left"], "K_new_left") : m.K_old;
        m.K_new_right = j.contains("K_new_right") ? matrix_from(j["K_new_right"], "K_new_right") : m.K_old;
        m.iterations = j.value("iterations", 0);
        m.restarts = j.value("restarts", 0);
        m.alpha_fixed = j.value("alpha_fixed", false);
        return m;
    } catch (const json::exception& e) {
        throw RectifyError(std::string("rectification model: ") + e.what());
    }
}

void save_model(const RectificationModel& model, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw RectifyError("cannot write " + path.string());
    f << model_to_json(model) << '\n';
    if (!f) throw RectifyError("write failed: " + path.string());
}

RectificationModel load_model(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw RectifyError("cannot read " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace uwr::rectify
