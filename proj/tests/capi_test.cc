// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "submodinfo/submodinfo.h"

namespace {

using nlohmann::json;

const std::string kFixture = std::string(SUBMODINFO_TEST_DATA) + "/scenes.json";

class CollectionTest : public ::testing::Test {
 protected:
  void SetUp() override { ASSERT_EQ(smi_collection_load(kFixture.c_str(), &coll_), SMI_OK); }
  void TearDown() override { smi_collection_free(coll_); }

  json Call(smi_status (*fn)(const smi_collection*, const char*, char**), const json& req,
            smi_status expect = SMI_OK) {
    char* out = nullptr;
    EXPECT_EQ(fn(coll_, req.dump().c_str(), &out), expect) << smi_last_error_message();
    if (!out) return json();
    json j = json::parse(out);
    smi_free_string(out);
    return j;
  }

  smi_collection* coll_ = nullptr;
};

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STRNE(smi_version(), "");
  EXPECT_STREQ(smi_status_name(SMI_OK), "ok");
  EXPECT_STRNE(smi_status_name(SMI_ERROR_UNSUPPORTED), smi_status_name(SMI_ERROR_CONFIG));
}

TEST(CApi, NullArguments) {
  EXPECT_EQ(smi_collection_load(nullptr, nullptr), SMI_ERROR_INVALID_ARGUMENT);
  EXPECT_EQ(smi_collection_size(nullptr, nullptr), SMI_ERROR_INVALID_ARGUMENT);
  smi_collection_free(nullptr);
  smi_free_string(nullptr);
}

TEST(CApi, LoadErrors) {
  smi_collection* c = nullptr;
  EXPECT_EQ(smi_collection_load("/nonexistent/path.json", &c), SMI_ERROR_IO);
  EXPECT_EQ(c, nullptr);
  EXPECT_NE(std::string(smi_last_error_message()), "");
  EXPECT_EQ(smi_collection_parse("{not json", &c), SMI_ERROR_FORMAT);
  EXPECT_EQ(smi_collection_parse(R"({"name": "x"})", &c), SMI_ERROR_FORMAT);
}

TEST_F(CollectionTest, SizeAndRoundTrip) {
  size_t n = 0;
  ASSERT_EQ(smi_collection_size(coll_, &n), SMI_OK);
  EXPECT_EQ(n, 12u);
  char* text = nullptr;
  ASSERT_EQ(smi_collection_to_json(coll_, &text), SMI_OK);
  smi_collection* again = nullptr;
  ASSERT_EQ(smi_collection_parse(text, &again), SMI_OK);
  char* text2 = nullptr;
  ASSERT_EQ(smi_collection_to_json(again, &text2), SMI_OK);
  EXPECT_STREQ(text, text2);
  smi_free_string(text);
  smi_free_string(text2);
  smi_collection_free(again);
}

TEST_F(CollectionTest, Measure) {
  double v = -1.0;
  const json req{{"fn", "SetCover"}, {"mode", "smi"}, {"items", {"img01", "img05"}},
                 {"query", {"q_air"}}};
  ASSERT_EQ(smi_measure(coll_, req.dump().c_str(), &v), SMI_OK) << smi_last_error_message();
  EXPECT_DOUBLE_EQ(v, 2.0);
  const json cg{{"fn", "SetCover"}, {"mode", "cg"}, {"items", {"img04", "img03"}},
                {"privates", {"p_people"}}};
  ASSERT_EQ(smi_measure(coll_, cg.dump().c_str(), &v), SMI_OK) << smi_last_error_message();
  EXPECT_DOUBLE_EQ(v, 4.0);
  const json bad{{"fn", "GraphCut"}, {"mode", "csmi"}, {"items", {"img01"}},
                 {"query", {"q_air"}}, {"privates", {"p_people"}}};
  EXPECT_EQ(smi_measure(coll_, bad.dump().c_str(), &v), SMI_ERROR_UNSUPPORTED);
  const json unknown{{"fn", "SetCover"}, {"items", {"nope"}}};
  EXPECT_EQ(smi_measure(coll_, unknown.dump().c_str(), &v), SMI_ERROR_LOOKUP);
}

TEST_F(CollectionTest, SummarizeConceptQuery) {
  const json out = Call(smi_summarize, {{"flavor", "query"}, {"budget", 5},
                                        {"query", "aircraft,sky"}, {"fn", "FL2MI"}});
  ASSERT_EQ(out["items"].size(), 5u);
  const std::string first = out["items"][0];
  EXPECT_TRUE(first == "img01" || first == "img02") << first;
  EXPECT_EQ(out["measure"], "FL2MI");
}

TEST_F(CollectionTest, SummarizeErrors) {
  Call(smi_summarize, {{"flavor", "query"}, {"budget", 3}, {"fn", "FL1MI"}}, SMI_ERROR_CONFIG);
  Call(smi_summarize, {{"flavor", "generic"}, {"budget", 99}, {"fn", "FL"}}, SMI_ERROR_CONFIG);
  Call(smi_summarize, {{"flavor", "nope"}, {"budget", 2}}, SMI_ERROR_CONFIG);
}

TEST_F(CollectionTest, PrivacyAvoidsPeople) {
  const json out = Call(smi_summarize, {{"flavor", "privacy"}, {"budget", 3}, {"fn", "SetCover"},
                                        {"privates", {"p_people"}}});
  for (const std::string id : out["items"]) {
    EXPECT_TRUE(id != "img04" && id != "img07" && id != "img09" && id != "img11") << id;
  }
}

TEST_F(CollectionTest, Evaluate) {
  const json out = Call(smi_evaluate, {{"summary", {"img01", "img02", "img09", "img08", "img12"}}});
  EXPECT_EQ(out["per_reference"].size(), 2u);
  EXPECT_EQ(out["per_reference"][1]["score"], 1.0);
  const json self = Call(smi_evaluate, {{"summary", {"img01"}}, {"references", {{"img01"}}}});
  EXPECT_EQ(self["vrouge"], 1.0);
}

TEST(CApi, GenerateLearnAndSynth) {
  char* out = nullptr;
  ASSERT_EQ(smi_generate_collections(R"({"collections": 2, "seed": 3})", &out), SMI_OK);
  const json docs = json::parse(out);
  smi_free_string(out);
  ASSERT_EQ(docs.size(), 2u);

  smi_collection* c = nullptr;
  ASSERT_EQ(smi_collection_parse(docs[0].dump().c_str(), &c), SMI_OK);
  size_t n = 0;
  smi_collection_size(c, &n);
  EXPECT_EQ(n, 30u);
  smi_collection_free(c);

  ASSERT_EQ(smi_synth(R"({"study": "query", "seed": 7})", &out), SMI_OK)
      << smi_last_error_message();
  const json synth = json::parse(out);
  smi_free_string(out);
  EXPECT_TRUE(synth.contains("csv"));
  EXPECT_TRUE(synth.contains("report"));

  const json learn_req{{"task", "query"}, {"collections", docs}, {"epochs", 2}};
  ASSERT_EQ(smi_learn(learn_req.dump().c_str(), &out), SMI_OK) << smi_last_error_message();
  const json learned = json::parse(out);
  smi_free_string(out);
  EXPECT_EQ(learned["trace"].size(), 3u);
  EXPECT_LE(learned["best_objective"].get<double>(), learned["initial_objective"].get<double>());
  const json update_req{{"task", "update"}, {"collections", docs}};
  EXPECT_EQ(smi_learn(update_req.dump().c_str(), &out), SMI_ERROR_CONFIG);
}

TEST(CApi, OracleCheck) {
  char* out = nullptr;
  int passed = 0;
  ASSERT_EQ(smi_check_oracle(R"({"seed": 5})", &out, &passed), SMI_OK);
  EXPECT_EQ(passed, 1);
  EXPECT_FALSE(json::parse(out)["checks"].empty());
  smi_free_string(out);
}

}  // namespace
