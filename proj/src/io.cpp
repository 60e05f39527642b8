#include "deconv/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace deconv {

namespace {

using nlohmann::json;

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument(std::string(what) + ": expected a JSON object");
  }
  return j;
}

double require_number(const json& j, const char* what, const char* field) {
  if (!j.contains(field) || !j.at(field).is_number()) {
    throw std::invalid_argument(std::string(what) + ": missing or non-numeric field '" +
                                field + "'");
  }
  return j.at(field).get<double>();
}

double number_or(const json& j, const char* field, double fallback) {
  if (!j.contains(field)) return fallback;
  return j.at(field).get<double>();
}

SmoothnessDescriptor descriptor_from_json_obj(const json& j) {
  if (!j.contains("tag") || !j.at("tag").is_string()) {
    throw std::invalid_argument("smoothness descriptor: missing field 'tag'");
  }
  const std::string tag = j.at("tag").get<std::string>();
  if (tag == "polynomial") {
    return SmoothnessDescriptor::polynomial(
        require_number(j, "smoothness descriptor", "sigma"));
  }
  if (tag == "exponential") {
    return SmoothnessDescriptor::exponential(
        require_number(j, "smoothness descriptor", "gamma"),
        require_number(j, "smoothness descriptor", "s"));
  }
  throw std::invalid_argument("smoothness descriptor: unknown tag '" + tag +
                              "' (expected polynomial or exponential)");
}

SmoothnessClass class_from_json_obj(const json& j) {
  if (!j.contains("tag") || !j.at("tag").is_string()) {
    throw std::invalid_argument("smoothness class: missing field 'tag'");
  }
  const std::string tag = j.at("tag").get<std::string>();
  if (tag == "sobolev") {
    return SmoothnessClass::sobolev(require_number(j, "smoothness class", "beta"),
                                    require_number(j, "smoothness class", "L"));
  }
  if (tag == "supersmooth") {
    return SmoothnessClass::supersmooth(require_number(j, "smoothness class", "alpha"),
                                        require_number(j, "smoothness class", "r"),
                                        require_number(j, "smoothness class", "L"));
  }
  throw std::invalid_argument("smoothness class: unknown tag '" + tag +
                              "' (expected sobolev or supersmooth)");
}

json class_to_json_obj(const SmoothnessClass& cls) {
  if (cls.tag == SmoothnessClass::Tag::sobolev) {
    return json{{"tag", "sobolev"}, {"beta", cls.beta}, {"L", cls.radius}};
  }
  return json{{"tag", "supersmooth"},
              {"alpha", cls.alpha},
              {"r", cls.r},
              {"L", cls.radius}};
}

}  // namespace

NoiseModel parse_noise_json(const std::string& text) {
  const json j = parse_object(text, "noise");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("noise: missing field 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  NoiseModel noise;
  if (kind == "laplace_k") {
    const double k = require_number(j, "noise", "k");
    if (k != std::floor(k) || k < 1.0) {
      throw std::invalid_argument("noise: field 'k' must be a positive integer");
    }
    noise = NoiseModel::laplace(static_cast<int>(k), require_number(j, "noise", "scale"),
                                number_or(j, "loc", 0.0));
  } else if (kind == "gaussian") {
    noise = NoiseModel::gaussian(number_or(j, "loc", 0.0),
                                 require_number(j, "noise", "scale"));
  } else if (kind == "none" || kind == "custom") {
    // "custom" carries no sampling law of its own; it is realized as direct
    // observation plus whatever explicit smoothness descriptor accompanies it.
    noise = NoiseModel::none();
  } else {
    throw std::invalid_argument("noise: unknown kind '" + kind +
                                "' (expected laplace_k, gaussian, or none)");
  }
  if (j.contains("smoothness")) {
    noise = noise.with_smoothness(descriptor_from_json_obj(j.at("smoothness")));
  }
  return noise;
}

DensityModel parse_density_json(const std::string& text) {
  const json j = parse_object(text, "density");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw std::invalid_argument("density: missing field 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  DensityModel model = DensityModel::gaussian(0.0, 1.0);
  if (kind == "gaussian") {
    model = DensityModel::gaussian(number_or(j, "loc", 0.0),
                                   require_number(j, "density", "scale"));
  } else if (kind == "laplace_k") {
    const double k = require_number(j, "density", "k");
    if (k != std::floor(k) || k < 1.0) {
      throw std::invalid_argument("density: field 'k' must be a positive integer");
    }
    model = DensityModel::laplace(static_cast<int>(k),
                                  require_number(j, "density", "scale"),
                                  number_or(j, "loc", 0.0));
  } else if (kind == "gaussian_mixture") {
    if (!j.contains("components") || !j.at("components").is_array() ||
        j.at("components").empty()) {
      throw std::invalid_argument(
          "density: gaussian_mixture requires a nonempty 'components' array");
    }
    std::vector<MixtureComponent> parts;
    for (const json& c : j.at("components")) {
      MixtureComponent part;
      part.weight = require_number(c, "mixture component", "weight");
      part.loc = number_or(c, "loc", 0.0);
      part.scale = require_number(c, "mixture component", "scale");
      parts.push_back(part);
    }
    model = DensityModel::gaussian_mixture(parts);
  } else {
    throw std::invalid_argument(
        "density: unknown kind '" + kind +
        "' (expected gaussian, laplace_k, or gaussian_mixture)");
  }
  if (j.contains("smoothness")) {
    const json& s = j.at("smoothness");
    // Both the object form and the compact spec string are accepted here,
    // matching the study configs' top-level "class" key.
    model = model.with_smoothness(s.is_string()
                                      ? parse_class_spec(s.get<std::string>())
                                      : class_from_json_obj(s));
  }
  return model;
}

SmoothnessClass parse_class_spec(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  if (head != "sobolev" && head != "supersmooth") {
    if (!spec.empty() && spec.front() == '{') {
      return class_from_json_obj(parse_object(spec, "smoothness class"));
    }
    throw std::invalid_argument("smoothness class: unknown tag '" + head +
                                "' (expected sobolev or supersmooth)");
  }
  double beta = 0.0, alpha = 0.0, r = 0.0, radius = 0.0;
  bool have_beta = false, have_alpha = false, have_r = false, have_radius = false;
  if (colon != std::string::npos) {
    std::stringstream body(spec.substr(colon + 1));
    std::string item;
    while (std::getline(body, item, ',')) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("smoothness class: expected key=value, got '" +
                                    item + "'");
      }
      const std::string key = item.substr(0, eq);
      double value = 0.0;
      try {
        std::size_t used = 0;
        value = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw std::invalid_argument("smoothness class: non-numeric value in '" + item +
                                    "'");
      }
      if (key == "beta") {
        beta = value;
        have_beta = true;
      } else if (key == "alpha") {
        alpha = value;
        have_alpha = true;
      } else if (key == "r") {
        r = value;
        have_r = true;
      } else if (key == "L") {
        radius = value;
        have_radius = true;
      } else {
        throw std::invalid_argument("smoothness class: unknown key '" + key + "'");
      }
    }
  }
  if (head == "sobolev") {
    if (!have_beta || !have_radius) {
      throw std::invalid_argument("smoothness class: sobolev requires beta and L");
    }
    return SmoothnessClass::sobolev(beta, radius);
  }
  if (!have_alpha || !have_r || !have_radius) {
    throw std::invalid_argument("smoothness class: supersmooth requires alpha, r and L");
  }
  return SmoothnessClass::supersmooth(alpha, r, radius);
}

SmoothnessDescriptor parse_descriptor_json(const std::string& text) {
  return descriptor_from_json_obj(parse_object(text, "smoothness descriptor"));
}

std::string noise_to_json(const NoiseModel& noise) {
  json j{{"kind", noise.kind}};
  if (noise.kind == "laplace_k") {
    j["k"] = noise.k;
    j["scale"] = noise.scale;
    j["loc"] = noise.loc;
  } else if (noise.kind == "gaussian") {
    j["loc"] = noise.loc;
    j["scale"] = noise.scale;
  }
  if (noise.smoothness) {
    const SmoothnessDescriptor& d = *noise.smoothness;
    if (d.tag == SmoothnessDescriptor::Tag::polynomial) {
      j["smoothness"] = json{{"tag", "polynomial"}, {"sigma", d.sigma}};
    } else {
      j["smoothness"] = json{{"tag", "exponential"}, {"gamma", d.gamma}, {"s", d.s}};
    }
  }
  return j.dump();
}

std::string density_to_json(const DensityModel& model) {
  const ModelInfo info = model.info();
  json j{{"kind", info.kind}};
  if (info.kind == "gaussian") {
    j["loc"] = info.loc;
    j["scale"] = info.scale;
  } else if (info.kind == "laplace_k") {
    j["k"] = info.k;
    j["scale"] = info.scale;
    j["loc"] = info.loc;
  } else if (info.kind == "gaussian_mixture") {
    json parts = json::array();
    for (const MixtureComponent& c : info.components) {
      parts.push_back(json{{"weight", c.weight}, {"loc", c.loc}, {"scale", c.scale}});
    }
    j["components"] = parts;
  } else {
    throw std::invalid_argument("density: kind '" + info.kind +
                                "' has no JSON representation");
  }
  if (model.smoothness()) {
    j["smoothness"] = class_to_json_obj(*model.smoothness());
  }
  return j.dump();
}

std::string class_to_spec(const SmoothnessClass& cls) {
  std::ostringstream out;
  out.precision(17);
  if (cls.tag == SmoothnessClass::Tag::sobolev) {
    out << "sobolev:beta=" << cls.beta << ",L=" << cls.radius;
  } else {
    out << "supersmooth:alpha=" << cls.alpha << ",r=" << cls.r << ",L=" << cls.radius;
  }
  return out.str();
}

std::vector<double> read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("data file: cannot open '" + path + "'");
  }
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t begin = line.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t\r\n");
    const std::string token = line.substr(begin, end - begin + 1);
    try {
      std::size_t used = 0;
      const double value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument("trailing text");
      values.push_back(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("data file: line " + std::to_string(line_no) +
                                  " of '" + path + "' is not a number: '" + token +
                                  "'");
    }
  }
  return values;
}

std::string load_inline_or_file(const std::string& value) {
  const std::size_t begin = value.find_first_not_of(" \t\r\n");
  if (begin != std::string::npos && (value[begin] == '{' || value[begin] == '[')) {
    return value;
  }
  std::ifstream in(value);
  if (!in) {
    throw std::invalid_argument("config: cannot open file '" + value + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace deconv
