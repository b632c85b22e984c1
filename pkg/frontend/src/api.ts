/** Client for the Disco session service's JSON API. */

export interface Block {
  kind: "value" | "type" | "doc" | "test-report" | "error";
  text: string;
  docURL?: string;
}

export interface FileBuffer {
  name: string;
  contents: string;
}

export class HttpError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class DiscoClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post(path: string, body: unknown): Promise<unknown> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new HttpError(resp.status, `request failed with ${resp.status}`);
    }
    return resp.json();
  }

  async createSession(): Promise<string> {
    const data = (await this.post("/api/session", {})) as { sessionId: string };
    return data.sessionId;
  }

  async sendLine(sessionId: string, line: string): Promise<Block[]> {
    const data = (await this.post(`/api/session/${sessionId}/input`, { line })) as {
      blocks: Block[];
    };
    return data.blocks;
  }

  async loadBuffer(sessionId: string, files: FileBuffer[]): Promise<Block[]> {
    const data = (await this.post(`/api/session/${sessionId}/load`, { files })) as {
      blocks: Block[];
    };
    return data.blocks;
  }
}
