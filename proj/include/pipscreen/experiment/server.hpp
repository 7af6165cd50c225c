// Copyright 2026 The Pipscreen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PIPSCREEN_EXPERIMENT_SERVER_HPP_
#define PIPSCREEN_EXPERIMENT_SERVER_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "pipscreen/dsp/wav.hpp"
#include "pipscreen/error.hpp"
#include "pipscreen/experiment/audio.hpp"
#include "pipscreen/experiment/export.hpp"
#include "pipscreen/experiment/session.hpp"
#include "pipscreen/experiment/store.hpp"
#include "pipscreen/json_util.hpp"
#include "pipscreen/tonepip/sequence.hpp"

// Included after Eigen: glibc's <resolv.h>, pulled in here, defines a `_res`
// macro that collides with Eigen parameter names.
#include "httplib.h"

namespace pipscreen::experiment {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kSessionExists:
    case ErrorCode::kSessionDone:
    case ErrorCode::kPhaseMismatch:
    case ErrorCode::kWrongBlock:
    case ErrorCode::kBlockAlreadyAccepted:
    case ErrorCode::kBlockNotServed:
    case ErrorCode::kBlockPendingAnswers:
    case ErrorCode::kPhaseIncomplete:
    case ErrorCode::kTonePipDuplicate:
    case ErrorCode::kSessionsNotFinished:
      return 409;
    case ErrorCode::kAnswersRejected:
      return 422;
    case ErrorCode::kIoError:
    case ErrorCode::kAudioUnavailable:
    case ErrorCode::kInsufficientCorpus:
      return 500;
    default:
      return 400;
  }
}

inline Json error_body(ErrorCode code, const std::string& message) {
  return {{"error",
           {{"code", static_cast<int>(code)},
            {"name", std::string(error_name(code))},
            {"message", message}}}};
}

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  double tonepip_ref_dbfs = -20.0;
};

// JSON-over-HTTP front end of a SessionStore. Error responses carry the
// stable integer code of the failure.
class ExperimentServer {
 public:
  ExperimentServer(SessionStore& store, std::shared_ptr<const StimulusRenderer> renderer,
                   ServerOptions options = {})
      : store_(store), renderer_(std::move(renderer)), options_(std::move(options)) {
    routes();
  }

  ~ExperimentServer() { stop(); }

  // Binds and serves on a background thread; returns the bound port.
  int start() {
    port_ = options_.port == 0 ? server_.bind_to_any_port(options_.host)
                               : (server_.bind_to_port(options_.host, options_.port)
                                      ? options_.port
                                      : -1);
    require(port_ > 0, ErrorCode::kIoError,
            "cannot bind " + options_.host + ":" + std::to_string(options_.port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Serves on the calling thread until stop() is called elsewhere.
  void run() {
    require(server_.listen(options_.host, options_.port), ErrorCode::kIoError,
            "cannot listen on " + options_.host + ":" + std::to_string(options_.port));
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  using Handler = std::function<Json(const httplib::Request&, httplib::Response&)>;

  static Json body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
      return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::kParseError, std::string("request body is not JSON: ") + e.what());
    }
  }

  static std::size_t index_param(const httplib::Request& req, const std::string& name) {
    const auto& text = req.path_params.at(name);
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == text.size() && !text.empty(), ErrorCode::kInvalidArgument,
            name + " must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  // Wraps a handler so thrown errors become JSON error responses.
  static httplib::Server::Handler json(Handler h, int ok_status = 200) {
    return [h, ok_status](const httplib::Request& req, httplib::Response& res) {
      try {
        res.status = ok_status;
        const Json out = h(req, res);
        if (!out.is_null()) res.set_content(out.dump(), "application/json");
      } catch (const Error& e) {
        res.status = http_status(e.code());
        res.set_content(error_body(e.code(), e.what()).dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(error_body(ErrorCode::kIoError, e.what()).dump(), "application/json");
      }
    };
  }

  void routes() {
    server_.Get("/api/health", json([](const auto&, auto&) { return Json{{"ok", true}}; }));

    server_.Post("/api/sessions", json(
        [this](const auto& req, auto&) {
          const Json b = body(req);
          const auto id = json_get<std::string>(b, "participant_id", "body");
          const auto seed = json_get_or<std::uint64_t>(b, "seed", 0, "body");
          return state_view_json(store_.create(id, seed));
        },
        201));

    server_.Get("/api/sessions", json([this](const auto&, auto&) {
      Json list = Json::array();
      for (const auto& s : store_.snapshot()) {
        list.push_back({{"session_id", s.session_id}, {"phase", to_string(s.phase)}});
      }
      return Json{{"sessions", list}};
    }));

    server_.Get("/api/sessions/:id", json([this](const auto& req, auto&) {
      return state_view_json(store_.get(req.path_params.at("id")));
    }));

    server_.Post("/api/sessions/:id/volume", json([this](const auto& req, auto&) {
      const auto setting = json_get<std::string>(body(req), "setting", "body");
      return store_.with_session(req.path_params.at("id"), [&](Session& s) {
        s.record_volume(setting);
        return state_view_json(s.state());
      });
    }));

    server_.Post("/api/sessions/:id/tonepip", json([this](const auto& req, auto&) {
      const Json b = body(req);
      const int f = json_get<int>(b, "frequency_hz", "body");
      const int n = json_get<int>(b, "n_pip", "body");
      return store_.with_session(req.path_params.at("id"), [&](Session& s) {
        const auto r = s.submit_tonepip(f, n);
        return Json{{"frequency_hz", r.frequency_hz},
                    {"n_pip", r.n_pip},
                    {"listening_level_db",
                     r.listening_level_db ? Json(*r.listening_level_db) : Json(nullptr)},
                    {"phase", to_string(s.state().phase)}};
      });
    }));

    server_.Get("/api/tonepip/:freq/audio", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
      json([this](const auto& r, auto& out) -> Json {
        tonepip::TonePipSequenceSpec spec;
        spec.frequency_hz = static_cast<int>(index_param(r, "freq"));
        spec.ref_level_dbfs = options_.tonepip_ref_dbfs;
        const auto seq = tonepip::gen_tonepip_sequence(spec, 48000.0);
        const auto wav = dsp::encode_wav(seq.audio, dsp::WavFormat::kPcm16);
        out.set_content(std::string(wav.begin(), wav.end()), "audio/wav");
        return nullptr;
      })(req, res);
    });

    server_.Post("/api/sessions/:id/next", json([this](const auto& req, auto&) {
      const auto id = req.path_params.at("id");
      return store_.with_session(id, [&](Session& s) {
        const auto t = s.next_stimulus();
        Json out = to_json(t);
        out["audio_url"] = "/api/sessions/" + id + "/stimuli/" + to_string(t.phase) + "/" +
                           std::to_string(t.index) + "/audio";
        return out;
      });
    }));

    server_.Get("/api/sessions/:id/stimuli/:phase/:index/audio",
                [this](const httplib::Request& req, httplib::Response& res) {
      json([this](const auto& r, auto& out) -> Json {
        const auto phase = parse_phase(r.path_params.at("phase"));
        const auto index = index_param(r, "index");
        const Stimulus stim = store_.with_session(
            r.path_params.at("id"),
            [&](Session& s) { return s.served_stimulus(phase, index); });
        require(renderer_ != nullptr, ErrorCode::kAudioUnavailable,
                "this server has no stimulus renderer");
        const auto wav = renderer_->render_wav(stim);
        out.set_content(std::string(wav.begin(), wav.end()), "audio/wav");
        return nullptr;
      })(req, res);
    });

    server_.Post("/api/sessions/:id/blocks/:block/answers",
                 [this](const httplib::Request& req, httplib::Response& res) {
      json([this](const auto& r, auto& out) -> Json {
        const Json b = body(r);
        const auto block = index_param(r, "block");
        const auto answers = json_get<std::vector<std::string>>(b, "answers", "body");
        const Json timing = b.contains("client_timing") ? b["client_timing"] : Json(nullptr);
        return store_.with_session(r.path_params.at("id"), [&](Session& s) {
          const auto v = s.submit_block_answers(block, answers, timing);
          Json result = to_json(v);
          if (!v.accepted) {
            out.status = http_status(ErrorCode::kAnswersRejected);
            Json err = error_body(ErrorCode::kAnswersRejected, "answers rejected");
            err["validation"] = result;
            return err;
          }
          result["phase"] = to_string(s.state().phase);
          return result;
        });
      })(req, res);
    });

    server_.Get("/api/export", json([this](const auto& req, auto&) {
      const bool partial = req.has_param("partial") && req.get_param_value("partial") != "0" &&
                           req.get_param_value("partial") != "false";
      const auto bundle = export_sessions(store_.snapshot(), partial);
      Json files = Json::object();
      for (const auto& [name, text] : bundle) files[name] = text;
      return Json{{"files", files}};
    }));
  }

  SessionStore& store_;
  std::shared_ptr<const StimulusRenderer> renderer_;
  ServerOptions options_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace pipscreen::experiment

#endif  // PIPSCREEN_EXPERIMENT_SERVER_HPP_
