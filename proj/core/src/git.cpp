#include "coedit/git.hpp"

#include <algorithm>

#include "coedit/channel.hpp"
#include "coedit/error.hpp"

namespace coedit {

GitRepository::GitRepository(std::filesystem::path path) : path_(std::move(path)) {
  const auto result = run_command({"git", "-C", path_.string(), "rev-parse", "--git-dir"});
  if (result.status != 0) throw DataError("not a git repository: " + path_.string());
}

GitRepository::~GitRepository() = default;
GitRepository::GitRepository(GitRepository&&) noexcept = default;
GitRepository& GitRepository::operator=(GitRepository&&) noexcept = default;

std::vector<std::string> GitRepository::git_lines(const std::vector<std::string>& args, char separator) const {
  std::vector<std::string> argv = {"git", "-C", path_.string()};
  argv.insert(argv.end(), args.begin(), args.end());
  const auto result = run_command(argv);
  if (result.status != 0) {
    std::string command;
    for (const auto& a : args) command += " " + a;
    throw DataError("git" + command + " failed in " + path_.string());
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < result.output.size()) {
    auto end = result.output.find(separator, start);
    if (end == std::string::npos) end = result.output.size();
    out.push_back(result.output.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<GitRepository::Commit> GitRepository::first_parent_history(std::size_t max_commits) const {
  if (max_commits == 0) return {};
  const auto head = run_command({"git", "-C", path_.string(), "rev-parse", "--verify", "-q", "HEAD"});
  if (head.status != 0) return {};  // no commits yet
  std::vector<Commit> commits;
  for (const auto& line :
       git_lines({"rev-list", "--first-parent", "--parents", "-n", std::to_string(max_commits), "HEAD"}, '\n')) {
    Commit c;
    std::size_t start = 0;
    bool first = true;
    while (start < line.size()) {
      auto end = line.find(' ', start);
      if (end == std::string::npos) end = line.size();
      std::string id = line.substr(start, end - start);
      if (first) {
        c.id = std::move(id);
        first = false;
      } else {
        c.parents.push_back(std::move(id));
      }
      start = end + 1;
    }
    if (!c.id.empty()) commits.push_back(std::move(c));
  }
  std::reverse(commits.begin(), commits.end());
  return commits;
}

std::vector<GitRepository::FileChange> GitRepository::changed_files(const std::string& from,
                                                                    const std::string& to) const {
  const auto fields = git_lines({"diff-tree", "-r", "-z", "--no-renames", "--name-status", from, to}, '\0');
  std::vector<FileChange> out;
  for (std::size_t i = 0; i + 1 < fields.size(); i += 2) {
    if (fields[i].empty()) continue;
    out.push_back({fields[i][0], fields[i + 1]});
  }
  return out;
}

std::vector<std::string> GitRepository::list_files(const std::string& commit) const {
  auto files = git_lines({"ls-tree", "-r", "-z", "--name-only", commit}, '\0');
  std::erase_if(files, [](const std::string& f) { return f.empty(); });
  return files;
}

std::map<std::string, std::string> GitRepository::read_files(const std::string& commit,
                                                             const std::vector<std::string>& paths) {
  if (!cat_file_) {
    cat_file_ = std::make_unique<Subprocess>(
        std::vector<std::string>{"git", "-C", path_.string(), "cat-file", "--batch"}, std::string{}, true);
  }
  std::map<std::string, std::string> out;
  for (const auto& path : paths) {
    if (path.find('\n') != std::string::npos) continue;
    cat_file_->write_line(commit + ":" + path);
    std::string header;
    if (!cat_file_->read_line(header)) throw DataError("git cat-file terminated unexpectedly");
    if (header.ends_with(" missing") || header.ends_with(" ambiguous")) continue;
    const auto space = header.rfind(' ');
    const std::size_t size = std::stoull(header.substr(space + 1));
    std::string content;
    std::string newline;
    if (!cat_file_->read_exact(size, content) || !cat_file_->read_exact(1, newline)) {
      throw DataError("git cat-file returned a truncated object");
    }
    if (header.find(" blob ") != std::string::npos) out.emplace(path, std::move(content));
  }
  return out;
}

}  // namespace coedit
