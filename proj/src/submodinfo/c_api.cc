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

#include "submodinfo/submodinfo.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"
#include "submodinfo/bench.h"
#include "submodinfo/core_data.h"
#include "submodinfo/error.h"
#include "submodinfo/service.h"

struct smi_collection {
  submodinfo::Collection collection;
};

namespace {

thread_local std::string last_error;

smi_status Fail(smi_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
smi_status Guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return SMI_OK;
  } catch (const submodinfo::Error& e) {
    return Fail(static_cast<smi_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return Fail(SMI_ERROR_FORMAT, std::string("malformed JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SMI_ERROR_UNKNOWN, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SMI_ERROR_UNKNOWN, e.what());
  } catch (...) {
    return Fail(SMI_ERROR_UNKNOWN, "unknown error");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json ParseRequest(const char* request) {
  if (!request || !*request) return nlohmann::json::object();
  nlohmann::json j = nlohmann::json::parse(request);
  if (!j.is_object()) throw submodinfo::FormatError("request must be a JSON object");
  return j;
}

void Emit(const nlohmann::json& j, char** result) { *result = CopyString(j.dump(2)); }

}  // namespace

extern "C" {

const char* smi_version(void) { return SUBMODINFO_VERSION; }

const char* smi_last_error_message(void) { return last_error.c_str(); }

const char* smi_status_name(smi_status status) {
  switch (status) {
    case SMI_OK:
      return "ok";
    case SMI_ERROR_INVALID_ARGUMENT:
      return "invalid argument";
    case SMI_ERROR_UNKNOWN:
      return "unknown error";
    case SMI_ERROR_FORMAT:
      return "format error";
    case SMI_ERROR_LOOKUP:
      return "lookup error";
    case SMI_ERROR_DEGENERATE:
      return "degenerate input";
    case SMI_ERROR_CONFIG:
      return "configuration error";
    case SMI_ERROR_NUMERIC:
      return "numeric error";
    case SMI_ERROR_UNSUPPORTED:
      return "unsupported";
    case SMI_ERROR_SIZE:
      return "size limit exceeded";
    case SMI_ERROR_IO:
      return "i/o error";
  }
  return "unrecognized status";
}

void smi_free_string(char* s) { std::free(s); }

smi_status smi_collection_load(const char* path, smi_collection** out) {
  if (!path || !out) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] { *out = new smi_collection{submodinfo::LoadCollection(path)}; });
}

smi_status smi_collection_parse(const char* json, smi_collection** out) {
  if (!json || !out) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    *out = new smi_collection{submodinfo::ParseCollection(nlohmann::json::parse(json))};
  });
}

void smi_collection_free(smi_collection* collection) { delete collection; }

smi_status smi_collection_size(const smi_collection* collection, size_t* out) {
  if (!collection || !out) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  *out = collection->collection.ground.size();
  return SMI_OK;
}

smi_status smi_collection_to_json(const smi_collection* collection, char** out) {
  if (!collection || !out) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] { Emit(submodinfo::CollectionToJson(collection->collection), out); });
}

smi_status smi_measure(const smi_collection* collection, const char* request, double* value) {
  if (!collection || !value) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    *value = submodinfo::HandleMeasure(collection->collection, ParseRequest(request))
                 .at("value")
                 .get<double>();
  });
}

smi_status smi_summarize(const smi_collection* collection, const char* request, char** result) {
  if (!collection || !result) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    Emit(submodinfo::HandleSummarize(collection->collection, ParseRequest(request)), result);
  });
}

smi_status smi_evaluate(const smi_collection* collection, const char* request, char** result) {
  if (!collection || !result) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    Emit(submodinfo::HandleEvaluate(collection->collection, ParseRequest(request)), result);
  });
}

smi_status smi_learn(const char* request, char** result) {
  if (!result) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] { Emit(submodinfo::HandleLearn(ParseRequest(request)), result); });
}

smi_status smi_synth(const char* request, char** result) {
  if (!result) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] { Emit(submodinfo::HandleSynth(ParseRequest(request)), result); });
}

smi_status smi_check_oracle(const char* request, char** result, int* passed) {
  if (!result || !passed) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    const nlohmann::json report = submodinfo::HandleCheckOracle(ParseRequest(request));
    *passed = report.at("passed").get<bool>() ? 1 : 0;
    Emit(report, result);
  });
}

smi_status smi_generate_collections(const char* request, char** result) {
  if (!result) return Fail(SMI_ERROR_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    const nlohmann::json req = ParseRequest(request);
    submodinfo::ConceptTaskConfig config;
    config.collections = req.value("collections", config.collections);
    config.items = req.value("items", config.items);
    config.concepts = req.value("concepts", config.concepts);
    config.topics = req.value("topics", config.topics);
    config.budget = req.value("budget", config.budget);
    config.references = req.value("references", config.references);
    config.seed = req.value("seed", config.seed);
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& c : submodinfo::ConceptTaskCollections(config)) {
      docs.push_back(submodinfo::CollectionToJson(c));
    }
    Emit(docs, result);
  });
}

}  // extern "C"
