// Copyright 2026 The Privsynth Authors
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

#ifndef PRIVSYNTH_SERVICE_JOB_STORE_H_
#define PRIVSYNTH_SERVICE_JOB_STORE_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/service/job.h"

struct sqlite3;

namespace privsynth::service {

struct NewJob {
  // Empty when the client sent none; such submissions always create a job.
  std::string idempotency_key;
  // Hash of everything that defines the job (body and options).
  std::string fingerprint;
  // Content address of the stored request body.
  std::string input_address;
  Json options = Json::object();
};

struct CreateResult {
  Job job;
  bool created = false;
};

// Durable job table in a single SQLite file. All methods are thread-safe and
// every state change is one transaction.
class JobStore {
 public:
  static absl::StatusOr<std::unique_ptr<JobStore>> Open(
      const std::filesystem::path& path);
  ~JobStore();

  JobStore(const JobStore&) = delete;
  JobStore& operator=(const JobStore&) = delete;

  // A repeated idempotency key with the same fingerprint returns the earlier
  // job; with a different fingerprint it is a conflict.
  absl::StatusOr<CreateResult> Create(const NewJob& job);
  absl::StatusOr<Job> Get(const std::string& id);
  absl::StatusOr<std::string> InputAddress(const std::string& id);

  // Rejects anything CanTransition rejects.
  absl::Status Transition(const std::string& id, JobState to);
  absl::Status Fail(const std::string& id, const JobError& error);
  // Appends to the artifact index unless an identical entry is present.
  // Terminal jobs are frozen.
  absl::Status AddArtifact(const std::string& id, const ArtifactRef& ref);

  // Ids of jobs that are neither done nor failed, oldest first.
  absl::StatusOr<std::vector<std::string>> ListActive();

 private:
  explicit JobStore(sqlite3* db) : db_(db) {}

  absl::StatusOr<Job> GetLocked(const std::string& id);
  absl::Status Exec(const char* sql);

  std::mutex mu_;
  sqlite3* db_;
};

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_JOB_STORE_H_
