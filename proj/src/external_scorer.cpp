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

#include <rankex/ranker.hpp>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <string_view>

namespace rankex {

struct ExternalScorer::Process {
  pid_t pid = -1;
  std::FILE* to_child = nullptr;
  std::FILE* from_child = nullptr;
  std::mutex mutex;
  std::string request;

  ~Process() {
    if (to_child != nullptr) {
      std::fputs("QUIT\n", to_child);
      std::fclose(to_child);
    }
    if (from_child != nullptr) std::fclose(from_child);
    if (pid > 0) {
      int status = 0;
      waitpid(pid, &status, 0);
    }
  }
};

ExternalScorer::ExternalScorer(const std::string& command, Index feature_count)
    : command_(command), feature_count_(feature_count), process_(std::make_unique<Process>()) {
  if (feature_count < 1) throw Error("external scorer needs a positive feature count");
  // A dead child must surface as a protocol error, not kill the caller.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0) throw ExternalScorerError("pipe: " + std::string(std::strerror(errno)));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ExternalScorerError("pipe: " + std::string(std::strerror(errno)));
  }
  const pid_t pid = fork();
  if (pid < 0) throw ExternalScorerError("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  process_->pid = pid;
  process_->to_child = fdopen(in_pipe[1], "w");
  process_->from_child = fdopen(out_pipe[0], "r");
  if (process_->to_child == nullptr || process_->from_child == nullptr) {
    throw ExternalScorerError("fdopen failed for scorer '" + command + "'");
  }
}

ExternalScorer::~ExternalScorer() = default;

double ExternalScorer::score(const VecX& doc) const {
  if (doc.size() != feature_count_) {
    throw Error("document has " + std::to_string(doc.size()) + " features, scorer expects " +
                std::to_string(feature_count_));
  }
  auto& p = *process_;
  std::lock_guard lock(p.mutex);

  p.request = "SCORE ";
  char buf[64];
  for (Index j = 0; j < doc.size(); ++j) {
    if (j > 0) p.request += ',';
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), doc(j));
    p.request.append(buf, end);
  }
  p.request += '\n';
  if (std::fputs(p.request.c_str(), p.to_child) < 0 || std::fflush(p.to_child) != 0) {
    throw ExternalScorerError("scorer '" + command_ + "' closed its input (exited?)");
  }

  char* line = nullptr;
  std::size_t cap = 0;
  const ssize_t len = getline(&line, &cap, p.from_child);
  std::string response = len > 0 ? std::string(line, static_cast<std::size_t>(len)) : std::string();
  std::free(line);
  if (len <= 0) throw ExternalScorerError("scorer '" + command_ + "' exited before responding");
  while (!response.empty() && (response.back() == '\n' || response.back() == '\r' ||
                               response.back() == ' ')) {
    response.pop_back();
  }
  std::string_view text = response;
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ExternalScorerError("scorer '" + command_ + "' sent malformed response '" + response +
                              "' to request '" + p.request.substr(0, p.request.size() - 1) + "'");
  }
  return value;
}

std::shared_ptr<ExternalScorer> external_scorer(const std::string& command, Index feature_count) {
  return std::make_shared<ExternalScorer>(command, feature_count);
}

}  // namespace rankex
