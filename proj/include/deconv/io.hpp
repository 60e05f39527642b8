#pragma once

#include <string>
#include <vector>

#include "deconv/models.hpp"

namespace deconv {

//! Model descriptors are JSON objects:
//!   noise   {"kind":"laplace_k","k":3,"scale":1.0,"loc":0.0,
//!            "smoothness":{"tag":"polynomial","sigma":6}}
//!           kinds: laplace_k | gaussian | none
//!   density {"kind":"gaussian","loc":1.0,"scale":1.0,
//!            "smoothness":{"tag":"sobolev","beta":1.0,"L":1.0}}
//!           kinds: gaussian | laplace_k | gaussian_mixture
//!           (mixture adds "components":[{"weight","loc","scale"},...])
//! Smoothness classes also have a compact flag form:
//!   sobolev:beta=1,L=1   supersmooth:alpha=0.4,r=2,L=2
//! Parse errors throw std::invalid_argument naming the field.

NoiseModel parse_noise_json(const std::string& text);
DensityModel parse_density_json(const std::string& text);
SmoothnessClass parse_class_spec(const std::string& spec);
SmoothnessDescriptor parse_descriptor_json(const std::string& text);

std::string noise_to_json(const NoiseModel& noise);
std::string density_to_json(const DensityModel& model);
std::string class_to_spec(const SmoothnessClass& cls);

//! Data files: one real per line, '#' starts a comment, blank lines ignored.
std::vector<double> read_data_file(const std::string& path);

//! Flag values that may be inline JSON or a path: anything starting with '{'
//! or '[' is literal, otherwise it is read as a file.
std::string load_inline_or_file(const std::string& value);

}  // namespace deconv
