#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace coedit {

class Subprocess;

/// Read-only access to a local git repository through the git executable.
class GitRepository {
 public:
  /// Throws DataError when `path` is not a git repository.
  explicit GitRepository(std::filesystem::path path);
  ~GitRepository();

  GitRepository(GitRepository&&) noexcept;
  GitRepository& operator=(GitRepository&&) noexcept;

  struct Commit {
    std::string id;
    std::vector<std::string> parents;
  };

  /// The most recent `max_commits` commits of the first-parent history of
  /// HEAD, oldest first.
  std::vector<Commit> first_parent_history(std::size_t max_commits) const;

  struct FileChange {
    char status;  // 'A', 'M', 'D', or 'T'
    std::string path;
  };

  /// Files changed between two commits, renames reported as delete + add.
  std::vector<FileChange> changed_files(const std::string& from, const std::string& to) const;

  /// Every file path in the commit's tree.
  std::vector<std::string> list_files(const std::string& commit) const;

  /// Contents of the given paths at `commit`; missing paths are omitted.
  std::map<std::string, std::string> read_files(const std::string& commit, const std::vector<std::string>& paths);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::vector<std::string> git_lines(const std::vector<std::string>& args, char separator) const;

  std::filesystem::path path_;
  std::unique_ptr<Subprocess> cat_file_;
};

}  // namespace coedit
