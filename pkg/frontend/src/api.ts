// Thin client for the retrieval service HTTP API.

export interface RetrievalItem {
  id: string;
  distance: number;
  thumbnail_url: string;
}

export interface StylizeResponse {
  contour: string; // base64 PNG
}

export interface RetrieveResponse {
  results: RetrievalItem[];
}

export interface ServiceClient {
  stylize(imageB64: string): Promise<StylizeResponse>;
  retrieve(imageB64: string, k: number): Promise<RetrieveResponse>;
  resolveUrl(path: string): string;
}

export class ServiceError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export function createClient(baseUrl: string, fetchFn?: FetchLike): ServiceClient {
  const doFetch: FetchLike = fetchFn ?? ((url, init) => fetch(url, init));
  const base = baseUrl.replace(/\/$/, "");

  async function post<T>(path: string, body: unknown): Promise<T> {
    const res = await doFetch(`${base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) {
      throw new ServiceError(res.status, `${path} failed with ${res.status}`);
    }
    return (await res.json()) as T;
  }

  return {
    stylize(imageB64: string) {
      return post<StylizeResponse>("/stylize", { image: imageB64 });
    },
    retrieve(imageB64: string, k: number) {
      return post<RetrieveResponse>("/retrieve", { image: imageB64, k });
    },
    resolveUrl(path: string) {
      return `${base}${path}`;
    },
  };
}
