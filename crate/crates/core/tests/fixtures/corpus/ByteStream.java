import java.io.IOException;
import java.io.InputStream;

public class ByteStream {
    private final InputStream input;
    private final byte[] buffer = new byte[1 << 16];

    public ByteStream(InputStream input) {
        this.input = input;
    }

    public int fill() throws IOException {
        int buflen = input.read(buffer, 0, buffer.length);
        return Math.max(buflen, 0);
    }
}
