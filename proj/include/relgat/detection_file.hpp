// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Detection files stand in for the region detector:
//
//   {
//     "format_version": 1,
//     "image_id": "...",
//     "image_width": 640, "image_height": 480,
//     "regions": [ {"bbox": [cx, cy, w, h], "category": 3, "feature": [...]}, ... ],
//     "union_features": [ {"src": 0, "dst": 1, "feature": [...]}, ... ]   (optional)
//   }
//
// bbox is CENTER format. Boxes may extend past the image border.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relgat/geometry.hpp"
#include "relgat/json_io.hpp"
#include "relgat/numerics.hpp"

namespace relgat {

struct Region {
  DetectedObject box;
  std::vector<double> feature;
};

struct DetectionFile {
  std::string image_id;
  double image_width = 0.0;
  double image_height = 0.0;
  std::vector<Region> regions;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> union_features;

  std::size_t size() const { return regions.size(); }
  std::size_t feature_dim() const {
    return regions.empty() ? 0 : regions.front().feature.size();
  }
  double diagonal() const { return image_diagonal(image_width, image_height); }

  std::vector<DetectedObject> objects() const {
    std::vector<DetectedObject> out;
    out.reserve(regions.size());
    for (const auto& r : regions) out.push_back(r.box);
    return out;
  }

  Matrix features() const {
    Matrix m(regions.size(), feature_dim());
    for (std::size_t i = 0; i < regions.size(); ++i) {
      std::copy(regions[i].feature.begin(), regions[i].feature.end(),
                m.row(i).begin());
    }
    return m;
  }
};

inline DetectionFile detection_file_from_json(const json& doc,
                                              const std::string& origin = "detections") {
  check_format_version(doc, origin);
  DetectionFile file;
  std::string field = "document";
  try {
    field = "image_id";
    file.image_id = doc.at("image_id").get<std::string>();
    field = "image_width";
    file.image_width = doc.at("image_width").get<double>();
    field = "image_height";
    file.image_height = doc.at("image_height").get<double>();
    if (!(file.image_width > 0.0) || !(file.image_height > 0.0)) {
      throw InputError(origin + ": image_width and image_height must be positive");
    }
    const auto& regions = doc.at("regions");
    if (!regions.is_array()) throw InputError(origin + ": 'regions' must be an array");
    for (std::size_t i = 0; i < regions.size(); ++i) {
      field = "regions[" + std::to_string(i) + "]";
      const auto& r = regions[i];
      const auto bbox = r.at("bbox").get<std::vector<double>>();
      if (bbox.size() != 4) {
        throw InputError(origin + ": " + field + ".bbox must have 4 numbers");
      }
      Region region;
      region.box = {bbox[0], bbox[1], bbox[2], bbox[3], r.at("category").get<int>()};
      try {
        validate_box(region.box);
      } catch (const DomainError& e) {
        throw InputError(origin + ": " + field + ".bbox: " + e.what());
      }
      region.feature = r.at("feature").get<std::vector<double>>();
      if (i > 0 && region.feature.size() != file.regions.front().feature.size()) {
        throw ShapeError(origin + ": " + field + ".feature has length " +
                         std::to_string(region.feature.size()) +
                         " but regions[0].feature has length " +
                         std::to_string(file.regions.front().feature.size()));
      }
      file.regions.push_back(std::move(region));
    }
    if (doc.contains("union_features")) {
      const auto& unions = doc.at("union_features");
      for (std::size_t k = 0; k < unions.size(); ++k) {
        field = "union_features[" + std::to_string(k) + "]";
        const auto src = unions[k].at("src").get<std::size_t>();
        const auto dst = unions[k].at("dst").get<std::size_t>();
        auto feature = unions[k].at("feature").get<std::vector<double>>();
        if (src >= file.size() || dst >= file.size()) {
          throw InputError(origin + ": " + field + " refers to a missing region");
        }
        if (feature.size() != file.feature_dim()) {
          throw ShapeError(origin + ": " + field + ".feature has length " +
                           std::to_string(feature.size()) + ", expected " +
                           std::to_string(file.feature_dim()));
        }
        file.union_features[{src, dst}] = std::move(feature);
      }
    }
  } catch (const json::exception& e) {
    throw InputError(origin + ": bad or missing field " + field + ": " + e.what());
  }
  return file;
}

inline DetectionFile load_detection_file(const std::string& path) {
  return detection_file_from_json(load_json_file(path), path);
}

}  // namespace relgat
