/** Arrow-key input history; survives buffer loads because it lives on
 * the playground state, not the input element. */

export class InputHistory {
  private entries: string[] = [];
  private cursor = 0; // entries.length means "past the newest entry"
  private draft = "";

  push(line: string): void {
    if (line.trim().length > 0) {
      this.entries.push(line);
    }
    this.cursor = this.entries.length;
    this.draft = "";
  }

  previous(current: string): string | null {
    if (this.cursor === 0) {
      return null;
    }
    if (this.cursor === this.entries.length) {
      this.draft = current;
    }
    this.cursor -= 1;
    return this.entries[this.cursor];
  }

  next(): string | null {
    if (this.cursor >= this.entries.length) {
      return null;
    }
    this.cursor += 1;
    return this.cursor === this.entries.length ? this.draft : this.entries[this.cursor];
  }

  get length(): number {
    return this.entries.length;
  }
}
