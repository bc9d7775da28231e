// python/bindings.cc


// Copyright 2026  The ldadnn Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


// Python bindings.  Frames are NumPy arrays (one row per frame), bags are
// count arrays (one row per document) and models round-trip through the same
// JSON the command-line tool writes.

#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ldadnn/common.h"
#include "ldadnn/corpus.h"
#include "ldadnn/domains.h"
#include "ldadnn/gmm.h"
#include "ldadnn/lda.h"
#include "ldadnn/network.h"
#include "ldadnn/synthetic.h"

namespace py = pybind11;
using namespace ldadnn;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CountMatrix = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<BagOfSounds> BagsFromCounts(const CountMatrix &counts) {
  std::vector<BagOfSounds> bags(counts.rows());
  for (Eigen::Index m = 0; m < counts.rows(); ++m) {
    bags[m].id = std::to_string(m);
    bags[m].counts.assign(counts.row(m).data(), counts.row(m).data() + counts.cols());
    for (int64_t c : bags[m].counts) {
      if (c < 0) throw Error(ErrorCode::kOutOfRange, "counts must be non-negative");
      bags[m].total += c;
    }
  }
  return bags;
}

LdaConfig MakeLdaConfig(uint64_t seed, std::optional<double> alpha, double smoothing,
                        int max_em_iters, int threads, bool theta_excludes_prior) {
  LdaConfig cfg;
  cfg.seed = seed;
  cfg.alpha = alpha;
  cfg.smoothing = smoothing;
  cfg.max_em_iters = max_em_iters;
  cfg.threads = threads;
  cfg.theta_excludes_prior = theta_excludes_prior;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Latent-domain discovery and domain-aware network training";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      PyErr_SetString(PyExc_ValueError,
                      (std::string(ErrorCodeName(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<GmmModel>(m, "GmmModel")
      .def_property_readonly("weights", &GmmModel::weights)
      .def_property_readonly("means", &GmmModel::means)
      .def_property_readonly("variances", &GmmModel::variances)
      .def_property_readonly("num_components", &GmmModel::NumComponents)
      .def("responsibilities",
           [](const GmmModel &g, const Eigen::VectorXd &x) {
             if (x.size() != g.Dim())
               throw Error(ErrorCode::kDimensionMismatch, "frame dimension mismatch");
             return Responsibilities(g, x);
           })
      .def("quantize",
           [](const GmmModel &g, const RowMatrix &frames) {
             FeatureDocument doc{"frames", std::nullopt, frames, {}};
             return Quantize(g, doc).symbols;
           },
           py::arg("frames"))
      .def("to_json", [](const GmmModel &g) { return g.ToJson().dump(); })
      .def_static("from_json",
                  [](const std::string &s) { return GmmModel::FromJson(Json::parse(s)); });

  m.def(
      "train_gmm",
      [](const RowMatrix &frames, int components, int threads) {
        GmmConfig cfg;
        cfg.threads = threads;
        return TrainGmm(frames, components, cfg);
      },
      py::arg("frames"), py::arg("components"), py::arg("threads") = 1,
      "Mix-up EM training of a diagonal-covariance GMM.");

  py::class_<LdaModel>(m, "LdaModel")
      .def_property_readonly("alpha", &LdaModel::alpha)
      .def_property_readonly("num_topics", &LdaModel::NumTopics)
      .def_property_readonly("beta",
                             [](const LdaModel &model) -> RowMatrix {
                               return model.log_beta().array().exp();
                             })
      .def("to_json", [](const LdaModel &model) { return model.ToJson().dump(); })
      .def_static("from_json",
                  [](const std::string &s) { return LdaModel::FromJson(Json::parse(s)); });

  m.def(
      "fit_lda",
      [](const CountMatrix &counts, int k, uint64_t seed, std::optional<double> alpha,
         double smoothing, int max_em_iters, int threads) {
        return FitLda(BagsFromCounts(counts), k,
                      MakeLdaConfig(seed, alpha, smoothing, max_em_iters, threads, false));
      },
      py::arg("counts"), py::arg("k"), py::arg("seed") = 0, py::arg("alpha") = py::none(),
      py::arg("smoothing") = 1e-3, py::arg("max_em_iters") = 50, py::arg("threads") = 1,
      "Variational-EM LDA over a documents x symbols count matrix.");

  py::class_<DomainAssignment>(m, "DomainAssignment")
      .def_readonly("doc_id", &DomainAssignment::doc_id)
      .def_readonly("map_domain", &DomainAssignment::map_domain)
      .def_readonly("theta", &DomainAssignment::theta)
      .def_readonly("weight", &DomainAssignment::weight)
      .def_property_readonly("ubic", [](const DomainAssignment &a) { return UbicEncode(a).code; })
      .def("__repr__", [](const DomainAssignment &a) {
        return "<DomainAssignment " + a.doc_id + " map=" + std::to_string(a.map_domain) + ">";
      });

  m.def(
      "assign",
      [](const LdaModel &model, const CountMatrix &counts, bool theta_excludes_prior) {
        return Assign(model, BagsFromCounts(counts),
                      MakeLdaConfig(0, std::nullopt, 1e-3, 50, 1, theta_excludes_prior));
      },
      py::arg("model"), py::arg("counts"), py::arg("theta_excludes_prior") = false,
      "Per-document domain posterior and MAP domain.");

  m.def(
      "make_assignment",
      [](std::string id, std::vector<double> theta, double weight) {
        return MakeAssignment(std::move(id), std::move(theta), weight);
      },
      py::arg("doc_id"), py::arg("theta"), py::arg("weight"));

  m.def(
      "average_domain_entropy",
      [](const std::vector<DomainAssignment> &assignments, const std::string &unit) {
        if (unit != "bits" && unit != "nats")
          throw Error(ErrorCode::kOutOfRange, "unit must be bits or nats");
        return AverageDomainEntropy(assignments,
                                    unit == "bits" ? EntropyUnit::kBits : EntropyUnit::kNats);
      },
      py::arg("assignments"), py::arg("unit") = "bits");

  m.def(
      "ubic", [](int domain, int k) { return UbicFromIndex(domain, k).code; },
      py::arg("domain"), py::arg("k"));

  py::class_<FilterResult>(m, "FilterResult")
      .def_readonly("kept_ids", &FilterResult::kept_ids)
      .def_readonly("kept_tuples", &FilterResult::kept_tuples)
      .def_readonly("cutoff_tuple", &FilterResult::cutoff_tuple)
      .def_readonly("kept_weight", &FilterResult::kept_weight)
      .def_readonly("total_weight", &FilterResult::total_weight)
      .def_property_readonly("num_tuples",
                             [](const FilterResult &r) { return r.histogram.size(); });

  m.def("cross_agreement_filter", &CrossAgreementFilter, py::arg("assign_a"),
        py::arg("assign_b"), py::arg("target_weight"));

  py::class_<LdatNetwork>(m, "LdatNetwork")
      .def(py::init([](int input_dim, int output_dim, std::vector<int> hidden, int domain_dim,
                       const std::string &activation, uint64_t seed) {
             NetworkConfig cfg;
             cfg.input_dim = input_dim;
             cfg.output_dim = output_dim;
             cfg.hidden_dims = std::move(hidden);
             cfg.domain_dim = domain_dim;
             cfg.activation = ActivationFromName(activation);
             cfg.seed = seed;
             return LdatNetwork(cfg);
           }),
           py::arg("input_dim"), py::arg("output_dim"),
           py::arg("hidden") = std::vector<int>{64, 64}, py::arg("domain_dim") = 0,
           py::arg("activation") = "sigmoid", py::arg("seed") = 0)
      .def_property_readonly("domain_dim", &LdatNetwork::DomainDim)
      .def_property_readonly("domain_weights",
                             [](const LdatNetwork &n) -> Eigen::MatrixXd { return n.DomainWeights(); })
      .def(
          "forward",
          [](const LdatNetwork &n, const Eigen::VectorXd &x, std::vector<double> ubic) {
            return Forward(n, x, ubic);
          },
          py::arg("features"), py::arg("ubic") = std::vector<double>{})
      .def(
          "augment",
          [](const LdatNetwork &n, int k, uint64_t seed) {
            return InitAugmentedFromBaseline(n, k, seed);
          },
          py::arg("k"), py::arg("seed") = 0)
      .def(
          "gradient_check",
          [](const LdatNetwork &n, const Eigen::VectorXd &x, std::vector<double> ubic, int label,
             double eps) { return GradientCheck(n, x, ubic, label, eps); },
          py::arg("features"), py::arg("ubic"), py::arg("label"), py::arg("epsilon") = 1e-5)
      .def("to_json", [](const LdatNetwork &n) { return n.ToJson().dump(); })
      .def_static("from_json",
                  [](const std::string &s) { return LdatNetwork::FromJson(Json::parse(s)); });

  py::class_<FrameDataset>(m, "FrameDataset")
      .def(py::init([](const RowMatrix &frames, std::vector<int> labels, std::vector<int> domains,
                       int num_domains) {
             FrameDataset d;
             d.features = frames.transpose();
             d.labels = std::move(labels);
             d.domains = std::move(domains);
             d.num_domains = num_domains;
             return d;
           }),
           py::arg("frames"), py::arg("labels"), py::arg("domains") = std::vector<int>{},
           py::arg("num_domains") = 0)
      .def_property_readonly("size", &FrameDataset::Size);

  m.def(
      "train_network",
      [](const LdatNetwork &net, const FrameDataset &train, double lr, int batch, int epochs,
         uint64_t seed) {
        TrainConfig cfg;
        cfg.learning_rate = lr;
        cfg.batch_size = batch;
        cfg.epochs = epochs;
        cfg.seed = seed;
        return Train(net, train, FrameDataset{}, cfg).net;
      },
      py::arg("net"), py::arg("train"), py::arg("lr") = 0.1, py::arg("batch") = 32,
      py::arg("epochs") = 20, py::arg("seed") = 0);

  m.def("frame_accuracy", &FrameAccuracy, py::arg("net"), py::arg("data"));

  m.def("random_topics", &RandomTopics, py::arg("k"), py::arg("v"),
        py::arg("concentration"), py::arg("seed"));

  m.def(
      "synthetic_lda_counts",
      [](double alpha, const std::vector<std::vector<double>> &beta, int docs, int length,
         uint64_t seed) {
        const auto corpus = GenerateSyntheticLdaCorpus(alpha, beta, docs, length, seed);
        const int V = static_cast<int>(beta.front().size());
        CountMatrix counts(docs, V);
        for (int d = 0; d < docs; ++d) {
          const auto bag = ToBag(corpus[d], V);
          for (int w = 0; w < V; ++w) counts(d, w) = bag.counts[w];
        }
        return counts;
      },
      py::arg("alpha"), py::arg("beta"), py::arg("docs"), py::arg("length"), py::arg("seed"),
      "Documents x symbols counts drawn from the LDA generative process.");
}
