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

#include "privsynth/service/job_store.h"

#include <sqlite3.h>

#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/time/clock.h"
#include "absl/time/time.h"
#include "privsynth/common/status.h"

namespace privsynth::service {
namespace {

constexpr char kSchema[] = R"sql(
CREATE TABLE IF NOT EXISTS jobs (
  id TEXT PRIMARY KEY,
  state TEXT NOT NULL,
  created_ms INTEGER NOT NULL,
  updated_ms INTEGER NOT NULL,
  idempotency_key TEXT UNIQUE,
  fingerprint TEXT NOT NULL,
  input_address TEXT NOT NULL,
  options TEXT NOT NULL,
  error TEXT,
  artifacts TEXT NOT NULL
);
)sql";

constexpr char kSelectColumns[] =
    "SELECT id, state, created_ms, updated_ms, options, error, artifacts, "
    "idempotency_key, fingerprint, input_address FROM jobs ";

absl::Status DbError(sqlite3* db, std::string_view what) {
  return MakeError(ErrorKind::kIo, absl::StrCat("job store ", ToStd(what),
                                                ": ", sqlite3_errmsg(db)));
}

// Prepared statement with RAII finalize.
class Statement {
 public:
  Statement(sqlite3* db, const std::string& sql) : db_(db) {
    rc_ = sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr);
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  bool ok() const { return rc_ == SQLITE_OK; }
  void Bind(int index, const std::string& text) {
    sqlite3_bind_text(stmt_, index, text.c_str(),
                      static_cast<int>(text.size()), SQLITE_TRANSIENT);
  }
  void BindNull(int index) { sqlite3_bind_null(stmt_, index); }
  void Bind(int index, int64_t value) {
    sqlite3_bind_int64(stmt_, index, value);
  }
  int Step() { return sqlite3_step(stmt_); }
  std::string Text(int column) const {
    const unsigned char* text = sqlite3_column_text(stmt_, column);
    return text == nullptr ? std::string()
                           : std::string(reinterpret_cast<const char*>(text));
  }
  bool IsNull(int column) const {
    return sqlite3_column_type(stmt_, column) == SQLITE_NULL;
  }
  int64_t Int(int column) const { return sqlite3_column_int64(stmt_, column); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
  int rc_;
};

int64_t NowMillis() { return absl::ToUnixMillis(absl::Now()); }

std::string NewJobId() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard<std::mutex> lock(mu);
  return absl::StrFormat("j%016x%08x", rng(), static_cast<uint32_t>(rng()));
}

Json ErrorToJson(const JobError& error) {
  return {{"step", error.step}, {"kind", error.kind}, {"message", error.message}};
}

absl::StatusOr<Job> JobFromRow(const Statement& row) {
  Job job;
  job.id = row.Text(0);
  PRIVSYNTH_ASSIGN_OR_RETURN(job.state, ParseJobState(row.Text(1)));
  job.created_ms = row.Int(2);
  job.updated_ms = row.Int(3);
  PRIVSYNTH_ASSIGN_OR_RETURN(job.options, ParseJson(row.Text(4), "options"));
  if (!row.IsNull(5)) {
    PRIVSYNTH_ASSIGN_OR_RETURN(Json error, ParseJson(row.Text(5), "error"));
    JobError detail;
    PRIVSYNTH_ASSIGN_OR_RETURN(detail.step, GetString(error, "step", "error"));
    PRIVSYNTH_ASSIGN_OR_RETURN(detail.kind, GetString(error, "kind", "error"));
    PRIVSYNTH_ASSIGN_OR_RETURN(detail.message,
                               GetString(error, "message", "error"));
    job.error = std::move(detail);
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(Json artifacts,
                             ParseJson(row.Text(6), "artifacts"));
  for (size_t i = 0; i < artifacts.size(); ++i) {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        ArtifactRef ref,
        ArtifactRefFromJson(artifacts[i], IndexPath("artifacts", i)));
    job.artifacts.push_back(std::move(ref));
  }
  return job;
}

}  // namespace

absl::StatusOr<std::unique_ptr<JobStore>> JobStore::Open(
    const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  sqlite3* db = nullptr;
  if (sqlite3_open(path.string().c_str(), &db) != SQLITE_OK) {
    absl::Status status = DbError(db, "open");
    sqlite3_close(db);
    return status;
  }
  std::unique_ptr<JobStore> store(new JobStore(db));
  sqlite3_busy_timeout(db, 5000);
  PRIVSYNTH_RETURN_IF_ERROR(store->Exec("PRAGMA journal_mode=WAL;"));
  PRIVSYNTH_RETURN_IF_ERROR(store->Exec(kSchema));
  return store;
}

JobStore::~JobStore() { sqlite3_close(db_); }

absl::Status JobStore::Exec(const char* sql) {
  char* message = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &message) != SQLITE_OK) {
    absl::Status status = MakeError(
        ErrorKind::kIo,
        absl::StrCat("job store: ", message == nullptr ? "error" : message));
    sqlite3_free(message);
    return status;
  }
  return absl::OkStatus();
}

absl::StatusOr<CreateResult> JobStore::Create(const NewJob& request) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!request.idempotency_key.empty()) {
    Statement find(db_, absl::StrCat(kSelectColumns,
                                     "WHERE idempotency_key = ?1"));
    if (!find.ok()) return DbError(db_, "lookup");
    find.Bind(1, request.idempotency_key);
    if (find.Step() == SQLITE_ROW) {
      if (find.Text(8) != request.fingerprint) {
        return MakeError(ErrorKind::kConflict,
                         "idempotency key reused with a different request");
      }
      PRIVSYNTH_ASSIGN_OR_RETURN(Job existing, JobFromRow(find));
      return CreateResult{std::move(existing), false};
    }
  }
  Job job;
  job.id = NewJobId();
  job.state = JobState::kQueued;
  job.created_ms = job.updated_ms = NowMillis();
  job.options = request.options;
  Statement insert(
      db_,
      "INSERT INTO jobs (id, state, created_ms, updated_ms, idempotency_key, "
      "fingerprint, input_address, options, error, artifacts) "
      "VALUES (?1, ?2, ?3, ?3, ?4, ?5, ?6, ?7, NULL, '[]')");
  if (!insert.ok()) return DbError(db_, "insert");
  insert.Bind(1, job.id);
  insert.Bind(2, std::string(JobStateName(job.state)));
  insert.Bind(3, job.created_ms);
  if (request.idempotency_key.empty()) {
    insert.BindNull(4);
  } else {
    insert.Bind(4, request.idempotency_key);
  }
  insert.Bind(5, request.fingerprint);
  insert.Bind(6, request.input_address);
  insert.Bind(7, request.options.dump());
  if (insert.Step() != SQLITE_DONE) return DbError(db_, "insert");
  return CreateResult{std::move(job), true};
}

absl::StatusOr<Job> JobStore::GetLocked(const std::string& id) {
  Statement find(db_, absl::StrCat(kSelectColumns, "WHERE id = ?1"));
  if (!find.ok()) return DbError(db_, "lookup");
  find.Bind(1, id);
  if (find.Step() != SQLITE_ROW) {
    return MakeError(ErrorKind::kNotFound, absl::StrCat("no job ", id));
  }
  return JobFromRow(find);
}

absl::StatusOr<Job> JobStore::Get(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  return GetLocked(id);
}

absl::StatusOr<std::string> JobStore::InputAddress(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  Statement find(db_, "SELECT input_address FROM jobs WHERE id = ?1");
  if (!find.ok()) return DbError(db_, "lookup");
  find.Bind(1, id);
  if (find.Step() != SQLITE_ROW) {
    return MakeError(ErrorKind::kNotFound, absl::StrCat("no job ", id));
  }
  return find.Text(0);
}

absl::Status JobStore::Transition(const std::string& id, JobState to) {
  std::lock_guard<std::mutex> lock(mu_);
  PRIVSYNTH_ASSIGN_OR_RETURN(Job job, GetLocked(id));
  if (!CanTransition(job.state, to)) {
    return MakeError(ErrorKind::kConflict,
                     absl::StrCat("job ", id, " cannot move from ",
                                  ToStd(JobStateName(job.state)), " to ",
                                  ToStd(JobStateName(to))));
  }
  // The state guard keeps a concurrent writer from being overwritten.
  Statement update(db_,
                   "UPDATE jobs SET state = ?1, updated_ms = ?2 "
                   "WHERE id = ?3 AND state = ?4");
  if (!update.ok()) return DbError(db_, "update");
  update.Bind(1, std::string(JobStateName(to)));
  update.Bind(2, NowMillis());
  update.Bind(3, id);
  update.Bind(4, std::string(JobStateName(job.state)));
  if (update.Step() != SQLITE_DONE) return DbError(db_, "update");
  return absl::OkStatus();
}

absl::Status JobStore::Fail(const std::string& id, const JobError& error) {
  std::lock_guard<std::mutex> lock(mu_);
  PRIVSYNTH_ASSIGN_OR_RETURN(Job job, GetLocked(id));
  if (!CanTransition(job.state, JobState::kFailed)) {
    return MakeError(ErrorKind::kConflict,
                     absl::StrCat("job ", id, " is already ",
                                  ToStd(JobStateName(job.state))));
  }
  Statement update(db_,
                   "UPDATE jobs SET state = ?1, updated_ms = ?2, error = ?3 "
                   "WHERE id = ?4");
  if (!update.ok()) return DbError(db_, "update");
  update.Bind(1, std::string(JobStateName(JobState::kFailed)));
  update.Bind(2, NowMillis());
  update.Bind(3, ErrorToJson(error).dump());
  update.Bind(4, id);
  if (update.Step() != SQLITE_DONE) return DbError(db_, "update");
  return absl::OkStatus();
}

absl::Status JobStore::AddArtifact(const std::string& id,
                                   const ArtifactRef& ref) {
  std::lock_guard<std::mutex> lock(mu_);
  PRIVSYNTH_ASSIGN_OR_RETURN(Job job, GetLocked(id));
  if (IsTerminal(job.state)) {
    return MakeError(ErrorKind::kConflict,
                     absl::StrCat("job ", id, " is already ",
                                  ToStd(JobStateName(job.state))));
  }
  for (const ArtifactRef& existing : job.artifacts) {
    if (existing == ref) return absl::OkStatus();
  }
  job.artifacts.push_back(ref);
  Json artifacts = Json::array();
  for (const ArtifactRef& r : job.artifacts) {
    artifacts.push_back(ArtifactRefToJson(r));
  }
  Statement update(db_,
                   "UPDATE jobs SET artifacts = ?1, updated_ms = ?2 "
                   "WHERE id = ?3");
  if (!update.ok()) return DbError(db_, "update");
  update.Bind(1, artifacts.dump());
  update.Bind(2, NowMillis());
  update.Bind(3, id);
  if (update.Step() != SQLITE_DONE) return DbError(db_, "update");
  return absl::OkStatus();
}

absl::StatusOr<std::vector<std::string>> JobStore::ListActive() {
  std::lock_guard<std::mutex> lock(mu_);
  Statement list(db_,
                 "SELECT id FROM jobs WHERE state NOT IN ('done', 'failed') "
                 "ORDER BY created_ms, id");
  if (!list.ok()) return DbError(db_, "list");
  std::vector<std::string> ids;
  int rc;
  while ((rc = list.Step()) == SQLITE_ROW) ids.push_back(list.Text(0));
  if (rc != SQLITE_DONE) return DbError(db_, "list");
  return ids;
}

}  // namespace privsynth::service
