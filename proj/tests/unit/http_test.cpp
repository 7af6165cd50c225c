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

#include <memory>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "pipscreen/dsp/wav.hpp"
#include "pipscreen/experiment/audio.hpp"
#include "pipscreen/experiment/server.hpp"
#include "pipscreen/experiment/store.hpp"

namespace pipscreen::experiment {
namespace {

class HttpTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new Corpus(synthetic_corpus());
    store_ = new SessionStore(*corpus_, std::nullopt);
    RendererOptions ro;
    ro.babble_duration = 6.0;
    ro.babble_talkers = 4;
    server_ = new ExperimentServer(*store_, std::make_shared<StimulusRenderer>(*corpus_, ro),
                                   ServerOptions{"127.0.0.1", 0});
    port_ = server_->start();
  }
  static void TearDownTestSuite() {
    delete server_;
    delete store_;
    delete corpus_;
  }

  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

  static Json parse(const httplib::Result& r) { return Json::parse(r->body); }

  httplib::Result post(const std::string& path, const Json& body) const {
    return client().Post(path, body.dump(), "application/json");
  }

  static void expect_error(const httplib::Result& r, int status, ErrorCode code) {
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, status) << r->body;
    EXPECT_EQ(parse(r)["error"]["code"], static_cast<int>(code)) << r->body;
  }

  static inline Corpus* corpus_ = nullptr;
  static inline SessionStore* store_ = nullptr;
  static inline ExperimentServer* server_ = nullptr;
  static inline int port_ = 0;
};

TEST_F(HttpTest, Health) {
  const auto r = client().Get("/api/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
}

TEST_F(HttpTest, SessionLifecycleErrors) {
  auto r = post("/api/sessions", {{"participant_id", "H1"}, {"seed", 3}});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(parse(r)["phase"], "setup");
  expect_error(post("/api/sessions", {{"participant_id", "H1"}}), 409, ErrorCode::kSessionExists);
  expect_error(client().Get("/api/sessions/nobody"), 404, ErrorCode::kUnknownSession);
  expect_error(post("/api/sessions/H1/next", Json::object()), 409, ErrorCode::kPhaseMismatch);
  expect_error(client().Post("/api/sessions/H1/volume", "{not json", "application/json"), 400,
               ErrorCode::kParseError);
  expect_error(post("/api/sessions", {{"seed", 1}}), 400, ErrorCode::kParseError);
}

TEST_F(HttpTest, TonePipEndpoints) {
  post("/api/sessions", {{"participant_id", "H2"}});
  ASSERT_EQ(post("/api/sessions/H2/volume", {{"setting", "60%"}})->status, 200);
  auto r = post("/api/sessions/H2/tonepip", {{"frequency_hz", 1000}, {"n_pip", 13}});
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(parse(r)["listening_level_db"], 60.0);
  expect_error(post("/api/sessions/H2/tonepip", {{"frequency_hz", 500}, {"n_pip", 16}}), 400,
               ErrorCode::kTonePipOutOfRange);
  expect_error(post("/api/sessions/H2/tonepip", {{"frequency_hz", 1000}, {"n_pip", 3}}), 409,
               ErrorCode::kTonePipDuplicate);
  EXPECT_EQ(parse(client().Get("/api/sessions/H2"))["tonepip"][0]["listening_level_db"], 60.0);

  r = client().Get("/api/tonepip/1000/audio");
  ASSERT_EQ(r->status, 200);
  const auto audio = dsp::decode_wav({r->body.begin(), r->body.end()});
  EXPECT_EQ(audio.sample_rate(), 48000.0);
  EXPECT_EQ(audio.length(), 48000u + 15u * 14400u);
  expect_error(client().Get("/api/tonepip/3000/audio"), 400, ErrorCode::kUnknownFrequency);
}

TEST_F(HttpTest, BlockWithInvalidAnswerThenCorrected) {
  post("/api/sessions", {{"participant_id", "H3"}, {"seed", 8}});
  post("/api/sessions/H3/volume", {{"setting", "60%"}});
  for (int f : {500, 1000, 2000, 4000}) {
    post("/api/sessions/H3/tonepip", {{"frequency_hz", f}, {"n_pip", 11}});
  }
  std::vector<std::string> answers;
  for (int k = 0; k < 10; ++k) {
    const auto r = post("/api/sessions/H3/next", Json::object());
    ASSERT_EQ(r->status, 200) << r->body;
    const Json t = parse(r);
    EXPECT_EQ(t["phase"], "practice");
    EXPECT_EQ(t["index"], k);
    // The client learns nothing about the word or its condition.
    for (const char* key : {"word_id", "transcript", "method", "snr_db"}) {
      EXPECT_FALSE(t.contains(key)) << key;
    }
    answers.push_back(store_->with_session("H3", [&](Session& s) {
      return s.served_stimulus(Phase::kPractice, static_cast<std::size_t>(k)).transcript;
    }));
  }
  expect_error(post("/api/sessions/H3/next", Json::object()), 409,
               ErrorCode::kBlockPendingAnswers);

  const auto audio_r = client().Get("/api/sessions/H3/stimuli/practice/0/audio");
  ASSERT_EQ(audio_r->status, 200) << audio_r->body;
  const auto audio = dsp::decode_wav({audio_r->body.begin(), audio_r->body.end()});
  EXPECT_EQ(audio.sample_rate(), 48000.0);
  EXPECT_EQ(audio.channel_count(), 1u);
  expect_error(client().Get("/api/sessions/H3/stimuli/main/0/audio"), 409,
               ErrorCode::kBlockNotServed);

  auto bad = answers;
  bad[4] = "  ";
  auto r = post("/api/sessions/H3/blocks/0/answers", {{"answers", bad}});
  expect_error(r, 422, ErrorCode::kAnswersRejected);
  const Json body = parse(r);
  ASSERT_EQ(body["validation"]["diagnostics"].size(), 1u);
  EXPECT_EQ(body["validation"]["diagnostics"][0]["field"], 4);
  EXPECT_EQ(parse(client().Get("/api/sessions/H3"))["practice"]["accepted_blocks"], 0);

  r = post("/api/sessions/H3/blocks/0/answers",
           {{"answers", answers}, {"client_timing", {{"form_ms", 5300}}}});
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(parse(r)["phase"], "main");
  // Block numbers are per phase: block 0 of the main list is not served yet.
  expect_error(post("/api/sessions/H3/blocks/0/answers", {{"answers", answers}}), 409,
               ErrorCode::kBlockNotServed);

  const auto state = client().Get("/api/sessions/H3")->body;
  for (const auto& a : answers) EXPECT_EQ(state.find(a), std::string::npos);
}

TEST_F(HttpTest, Export) {
  post("/api/sessions", {{"participant_id", "H4"}});
  expect_error(client().Get("/api/export"), 409, ErrorCode::kSessionsNotFinished);
  const auto r = client().Get("/api/export?partial=1");
  ASSERT_EQ(r->status, 200);
  const Json files = parse(r)["files"];
  for (const auto& name : bundle_files()) EXPECT_TRUE(files.contains(name)) << name;
  EXPECT_NE(files["participants.csv"].get<std::string>().find("H4"), std::string::npos);
}

}  // namespace
}  // namespace pipscreen::experiment
