#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "dtinspect/error.hpp"
#include "dtinspect/pipeline.hpp"

namespace fs = std::filesystem;

namespace dtinspect {

Evaluation EvaluateReports(const std::string &report_dir, const SceneDataset &dataset) {
  if (!fs::is_directory(report_dir)) throw IoError("report directory does not exist: " + report_dir);
  std::vector<fs::path> paths;
  for (const auto &e : fs::recursive_directory_iterator(report_dir)) {
    if (e.is_regular_file() && e.path().filename() == "report.json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());

  Evaluation eval;
  struct Sums {
    Supercategory super;
    std::size_t n = 0;
    double iou = 0, depth = 0, color = 0;
  };
  std::map<std::string, Sums> sums;
  std::set<std::pair<std::string, int>> reported;

  for (const auto &path : paths) {
    const ReportedFrame rf = ReadReport(path.string());
    const Scene *scene = dataset.FindScene(rf.scene_id);
    int frame_id = -1;
    try {
      frame_id = std::stoi(rf.frame_id);
    } catch (const std::exception &) {
    }
    const ImageRecord *image = nullptr;
    if (scene) {
      for (const auto &im : scene->defects.images)
        if (im.id == frame_id) image = &im;
    }
    if (!image) {
      throw ValidationError(path.string() + ": no ground truth for scene '" + rf.scene_id +
                            "' frame " + rf.frame_id);
    }
    if (image->width != rf.width || image->height != rf.height) {
      throw ValidationError(path.string() + ": report size does not match the ground truth image");
    }
    reported.emplace(rf.scene_id, frame_id);
    const BinaryMask predicted = Union(rf.depth_mask, rf.color_mask);

    std::map<int, BinaryMask> gt;  // category id -> union of its annotations
    for (const auto &a : scene->defects.annotations) {
      if (a.image_id != frame_id) continue;
      BinaryMask m = AnnotationMask(a, image->width, image->height);
      auto [it, fresh] = gt.emplace(a.category_id, m);
      if (!fresh) it->second = Union(it->second, m);
    }
    for (const auto &[category_id, mask] : gt) {
      const DefectCategory *cat = scene->defects.FindCategory(category_id);
      ImageScore s{rf.scene_id, frame_id, cat->name, Iou(predicted, mask),
                   Iou(rf.depth_mask, mask), Iou(rf.color_mask, mask)};
      Sums &acc = sums.try_emplace(cat->name, Sums{cat->supercategory}).first->second;
      ++acc.n;
      acc.iou += s.iou;
      acc.depth += s.iou_depth;
      acc.color += s.iou_color;
      eval.images.push_back(std::move(s));
    }
  }
  for (const auto &[name, acc] : sums) {
    eval.categories.push_back({name, acc.super, acc.n, acc.iou / acc.n, acc.depth / acc.n,
                               acc.color / acc.n});
  }
  for (const auto &scene : dataset.scenes) {
    std::set<int> annotated;
    for (const auto &a : scene.defects.annotations) annotated.insert(a.image_id);
    for (int id : annotated) {
      if (!reported.count({scene.id, id})) eval.unreported.emplace_back(scene.id, id);
    }
  }
  return eval;
}

void WriteEvaluation(const Evaluation &eval, const std::string &out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const fs::path dir(out_dir);

  const std::string csv_path = (dir / "evaluation.csv").string();
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path);
  csv << "category,supercategory,images,mean_iou,mean_iou_depth,mean_iou_color\n";
  for (const auto &c : eval.categories) {
    csv << c.category << ',' << ToString(c.supercategory) << ',' << c.images << ',' << c.mean_iou
        << ',' << c.mean_iou_depth << ',' << c.mean_iou_color << '\n';
  }

  Json j;
  j["categories"] = Json::array();
  for (const auto &c : eval.categories) {
    j["categories"].push_back({{"category", c.category},
                               {"supercategory", ToString(c.supercategory)},
                               {"images", c.images},
                               {"mean_iou", c.mean_iou},
                               {"mean_iou_depth", c.mean_iou_depth},
                               {"mean_iou_color", c.mean_iou_color}});
  }
  j["images"] = Json::array();
  for (const auto &s : eval.images) {
    j["images"].push_back({{"scene_id", s.scene_id},
                           {"frame_id", s.frame_id},
                           {"category", s.category},
                           {"iou", s.iou},
                           {"iou_depth", s.iou_depth},
                           {"iou_color", s.iou_color}});
  }
  j["unreported"] = Json::array();
  for (const auto &[scene, frame] : eval.unreported) {
    j["unreported"].push_back({{"scene_id", scene}, {"frame_id", frame}});
  }
  WriteJsonFile(j, (dir / "evaluation.json").string());
}

}  // namespace dtinspect
